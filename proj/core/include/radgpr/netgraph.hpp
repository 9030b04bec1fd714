#pragma once

#include <set>
#include <string>
#include <vector>

namespace radgpr {

/// Dense square matrix, row-major. Row index = receiving agent.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    static SquareMatrix identity(std::size_t n) {
        SquareMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }
    double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    SquareMatrix operator*(const SquareMatrix& rhs) const;
    bool approx_equal(const SquareMatrix& rhs, double tol) const;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Periodic schedule of adjacency matrices A(t) = matrices[t mod period].
class GraphSchedule {
public:
    GraphSchedule(std::vector<SquareMatrix> matrices);

    /// Materialize an aperiodic generator over a declared horizon; the
    /// horizon then plays the role of the period for validation.
    template <typename Gen>
    static GraphSchedule from_generator(Gen&& gen, std::size_t horizon) {
        std::vector<SquareMatrix> ms;
        ms.reserve(horizon);
        for (std::size_t t = 0; t < horizon; ++t) ms.push_back(gen(t));
        return GraphSchedule(std::move(ms));
    }

    std::size_t agent_count() const { return n_; }
    std::size_t period() const { return matrices_.size(); }
    const SquareMatrix& at_time(long t) const {
        return matrices_[static_cast<std::size_t>(t) % matrices_.size()];
    }
    const std::vector<SquareMatrix>& matrices() const { return matrices_; }

private:
    std::vector<SquareMatrix> matrices_;
    std::size_t n_ = 0;
};

struct ValidationReport {
    bool ok = false;
    double alpha = 0.0;  // min positive entry over the period
    int b = 0;           // smallest window with strongly connected unions
    double zeta = 0.0;   // α^(n(n+1)b/2 − 1)
    bool constant_transition_product = false;  // informational only
    std::vector<std::string> violations;
};

/// Machine check of the three network assumptions: every b-window union
/// strongly connected, rows and columns summing to 1 (1e-12), and
/// non-degenerate weights (positive diagonal, entries in {0} ∪ [α,1]).
ValidationReport validate(const GraphSchedule& schedule);

/// In-neighbors {j ≠ i : a_ij(t) ≠ 0} of agent i at time t.
std::set<std::size_t> neighbors_in(const GraphSchedule& schedule, std::size_t agent, long t);

double zeta_from(double alpha, std::size_t n, int b);

/// Strong connectivity of the support digraph of a matrix union.
bool strongly_connected(const SquareMatrix& union_support);

}  // namespace radgpr
