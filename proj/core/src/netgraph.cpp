#include "radgpr/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace radgpr {

SquareMatrix SquareMatrix::operator*(const SquareMatrix& rhs) const {
    if (n_ != rhs.n_) throw std::invalid_argument("SquareMatrix: size mismatch");
    SquareMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = 0; k < n_; ++k) {
            const double v = at(i, k);
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < n_; ++j) {
                out.at(i, j) += v * rhs.at(k, j);
            }
        }
    }
    return out;
}

bool SquareMatrix::approx_equal(const SquareMatrix& rhs, double tol) const {
    if (n_ != rhs.n_) return false;
    for (std::size_t i = 0; i < a_.size(); ++i) {
        if (std::abs(a_[i] - rhs.a_[i]) > tol) return false;
    }
    return true;
}

GraphSchedule::GraphSchedule(std::vector<SquareMatrix> matrices)
    : matrices_(std::move(matrices)) {
    if (matrices_.empty()) throw std::invalid_argument("GraphSchedule: no matrices");
    n_ = matrices_[0].size();
    if (n_ == 0) throw std::invalid_argument("GraphSchedule: empty matrix");
    for (const auto& m : matrices_) {
        if (m.size() != n_) throw std::invalid_argument("GraphSchedule: inconsistent sizes");
    }
}

namespace {

// Tarjan; returns the number of strongly connected components.
int scc_count(const std::vector<std::vector<std::size_t>>& adj) {
    const std::size_t n = adj.size();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    int next_index = 0;
    int components = 0;

    std::function<void(std::size_t)> strongconnect = [&](std::size_t v) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w : adj[v]) {
            if (index[w] < 0) {
                strongconnect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            ++components;
            while (true) {
                const std::size_t w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                if (w == v) break;
            }
        }
    };

    for (std::size_t v = 0; v < n; ++v) {
        if (index[v] < 0) strongconnect(v);
    }
    return components;
}

std::vector<std::vector<std::size_t>> support_adjacency(const SquareMatrix& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && m.at(i, j) != 0.0) adj[j].push_back(i);  // info flows j → i
        }
    }
    return adj;
}

SquareMatrix window_union(const GraphSchedule& s, std::size_t start, int width) {
    SquareMatrix u(s.agent_count());
    for (int k = 0; k < width; ++k) {
        const SquareMatrix& a = s.at_time(static_cast<long>(start) + k);
        for (std::size_t i = 0; i < s.agent_count(); ++i) {
            for (std::size_t j = 0; j < s.agent_count(); ++j) {
                if (a.at(i, j) != 0.0) u.at(i, j) = 1.0;
            }
        }
    }
    return u;
}

}  // namespace

bool strongly_connected(const SquareMatrix& union_support) {
    return scc_count(support_adjacency(union_support)) == 1;
}

double zeta_from(double alpha, std::size_t n, int b) {
    const double exponent = 0.5 * static_cast<double>(n) * static_cast<double>(n + 1) *
                                static_cast<double>(b) -
                            1.0;
    return std::pow(alpha, exponent);
}

ValidationReport validate(const GraphSchedule& schedule) {
    ValidationReport rep;
    const std::size_t n = schedule.agent_count();
    const std::size_t period = schedule.period();

    // Finiteness and weight range, plus the minimum positive entry.
    double alpha = 1.0;
    bool entries_ok = true;
    for (std::size_t t = 0; t < period; ++t) {
        const SquareMatrix& a = schedule.matrices()[t];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double v = a.at(i, j);
                if (!std::isfinite(v)) {
                    throw std::invalid_argument("validate: non-finite matrix entry");
                }
                if (v < 0.0 || v > 1.0) {
                    entries_ok = false;
                }
                if (v > 0.0) alpha = std::min(alpha, v);
            }
            if (!(a.at(i, i) > 0.0)) {
                entries_ok = false;
            }
        }
    }
    if (!entries_ok) {
        rep.violations.push_back(
            "non-degeneracy: weights must lie in {0} ∪ [alpha,1] with positive diagonal");
    }
    rep.alpha = alpha;

    constexpr double kSumTol = 1e-12;
    bool balanced = true;
    for (std::size_t t = 0; t < period && balanced; ++t) {
        const SquareMatrix& a = schedule.matrices()[t];
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0, col = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                row += a.at(i, j);
                col += a.at(j, i);
            }
            if (std::abs(row - 1.0) > kSumTol || std::abs(col - 1.0) > kSumTol) {
                balanced = false;
                std::ostringstream msg;
                msg << "balanced communication: matrix " << t << " row/col " << i
                    << " sums are " << row << "/" << col;
                rep.violations.push_back(msg.str());
                break;
            }
        }
    }

    // Smallest window width whose unions are all strongly connected.
    // A width equal to the period covers every matrix, so nothing
    // larger can help.
    int b = 0;
    for (int width = 1; width <= static_cast<int>(period); ++width) {
        bool all_connected = true;
        for (std::size_t start = 0; start < period; ++start) {
            if (!strongly_connected(window_union(schedule, start, width))) {
                all_connected = false;
                break;
            }
        }
        if (all_connected) {
            b = width;
            break;
        }
    }
    if (b == 0) {
        rep.violations.push_back(
            "periodical strong connectivity: union over the whole period is not strongly "
            "connected");
    }
    rep.b = b;
    rep.zeta = (b > 0) ? zeta_from(alpha, n, b) : 0.0;
    rep.ok = rep.violations.empty();

    // Informational: whether the forward products A(t)···A(0) stay
    // constant over one period (never enforced).
    SquareMatrix prod = schedule.matrices()[0];
    rep.constant_transition_product = true;
    for (std::size_t t = 1; t <= period; ++t) {
        const SquareMatrix next = schedule.at_time(static_cast<long>(t)) * prod;
        if (!next.approx_equal(prod, 1e-12)) {
            rep.constant_transition_product = false;
            break;
        }
        prod = next;
    }
    return rep;
}

std::set<std::size_t> neighbors_in(const GraphSchedule& schedule, std::size_t agent, long t) {
    if (agent >= schedule.agent_count()) {
        throw std::out_of_range("neighbors_in: agent index out of range");
    }
    if (t < 0) {
        throw std::out_of_range("neighbors_in: negative time");
    }
    const SquareMatrix& a = schedule.at_time(t);
    std::set<std::size_t> out;
    for (std::size_t j = 0; j < schedule.agent_count(); ++j) {
        if (j != agent && a.at(agent, j) != 0.0) out.insert(j);
    }
    return out;
}

}  // namespace radgpr
