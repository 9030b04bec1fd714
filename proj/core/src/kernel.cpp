#include "radgpr/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "radgpr/netgraph.hpp"

namespace radgpr {

Kernel::Kernel(double sigma_f_sq, double lengthscale_sq, KernelFamily family)
    : sigma_f_sq_(sigma_f_sq), lengthscale_sq_(lengthscale_sq), family_(family) {
    if (!(sigma_f_sq > 0.0) || !std::isfinite(sigma_f_sq)) {
        throw std::invalid_argument("Kernel: sigma_f_sq must be positive");
    }
    if (!(lengthscale_sq > 0.0) || !std::isfinite(lengthscale_sq)) {
        throw std::invalid_argument("Kernel: lengthscale_sq must be positive");
    }
}

double Kernel::operator()(std::span<const double> z, std::span<const double> z2) const {
    if (z.size() != z2.size()) {
        throw std::invalid_argument("Kernel::eval: dimension mismatch");
    }
    return sigma_f_sq_ * std::exp(-squared_distance(z, z2) / lengthscale_sq_);
}

double Kernel::at_distance(double rho) const {
    return sigma_f_sq_ * std::exp(-(rho * rho) / lengthscale_sq_);
}

NoiseProfile::NoiseProfile(std::vector<double> variances) : variances_(std::move(variances)) {
    if (variances_.empty()) {
        throw std::invalid_argument("NoiseProfile: empty variance list");
    }
    for (double v : variances_) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("NoiseProfile: variances must be strictly positive");
        }
    }
    min_ = *std::min_element(variances_.begin(), variances_.end());
    max_ = *std::max_element(variances_.begin(), variances_.end());
}

double FusionConstants::gate(std::size_t agent) const {
    return std::max(0.0, c - psi.at(agent));
}

double FusionConstants::require_eps_plus() const {
    if (!eps_plus.has_value()) {
        throw std::runtime_error(
            "no agent satisfies c*sigma_f^2 - psi > 0; raise sigma_f^2");
    }
    return *eps_plus;
}

FusionConstants compute_fusion_constants(double sigma_f_sq, const NoiseProfile& noise) {
    if (!(sigma_f_sq >= 1.0)) {
        throw std::invalid_argument("compute_fusion_constants: requires sigma_f_sq >= 1");
    }
    const std::size_t n = noise.size();
    FusionConstants fc;
    fc.sigma_f_sq = sigma_f_sq;
    fc.psi.resize(n);
    fc.chi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double se2 = noise.variance(i);
        fc.psi[i] = sigma_f_sq / (sigma_f_sq + se2);
        fc.chi[i] = 1.0 / se2 + 1.0 / sigma_f_sq;
    }
    double chi_sum = 0.0;
    for (double x : fc.chi) chi_sum += x;
    fc.mu_chi = chi_sum / static_cast<double>(n);
    fc.sigma_chi_sq = 0.0;
    for (double x : fc.chi) {
        const double s = x + fc.mu_chi;
        fc.sigma_chi_sq += s * s;
    }

    // c = (Σ χψ)/(Σ χ) evaluated as ψ_a + Σχ_j(ψ_j − ψ_a)/Σχ_j so that
    // identical noise yields c − ψ_i = 0 exactly for every i.
    double num = 0.0;
    for (std::size_t j = 0; j < n; ++j) num += fc.chi[j] * (fc.psi[j] - fc.psi[0]);
    fc.c = fc.psi[0] + num / chi_sum;

    for (std::size_t i = 0; i < n; ++i) {
        const double margin = fc.c * sigma_f_sq - fc.psi[i];
        if (margin > 0.0) {
            fc.v_plus.push_back(i);
            fc.eps_plus = fc.eps_plus.has_value() ? std::min(*fc.eps_plus, margin) : margin;
        }
    }
    return fc;
}

VarianceConditionReport check_variance_condition(double sigma_f_sq, const NoiseProfile& noise) {
    VarianceConditionReport rep;
    rep.sigma_f_sq = sigma_f_sq;
    rep.rhs = noise.min_variance() / noise.max_variance();
    if (!(sigma_f_sq >= 1.0)) {
        return rep;  // condition requires sigma_f_sq >= 1
    }
    const FusionConstants fc = compute_fusion_constants(sigma_f_sq, noise);
    rep.v_plus_nonempty = fc.eps_plus.has_value();
    if (!rep.v_plus_nonempty) {
        return rep;  // empty V+ counts as violated
    }
    rep.lhs = fc.sigma_chi_sq / (fc.mu_chi * fc.mu_chi * (*fc.eps_plus));
    rep.satisfied = rep.lhs <= rep.rhs;
    return rep;
}

double select_sigma_f(const NoiseProfile& noise, double start) {
    if (!(start >= 1.0) || !std::isfinite(start)) {
        throw std::invalid_argument("select_sigma_f: start must be >= 1");
    }
    const auto ok = [&](double s) { return check_variance_condition(s, noise).satisfied; };

    if (ok(start)) return start;

    double lo = start;
    double hi = start;
    bool found = false;
    for (int k = 0; k < 64; ++k) {
        hi *= 2.0;
        if (ok(hi)) {
            found = true;
            break;
        }
        lo = hi;
    }
    if (!found) {
        throw std::runtime_error("select_sigma_f: no satisfying sigma_f^2 within 64 doublings");
    }
    // Shrink toward the smallest satisfying value; hi stays feasible.
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (ok(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

namespace {

int flood_round_cap(const GraphSchedule& schedule, int b) {
    const int n = static_cast<int>(schedule.agent_count());
    return std::max(1, n * std::max(1, b));
}

}  // namespace

FloodResult flood_exchange(const GraphSchedule& schedule, std::span<const double> local_values,
                           int connectivity_window_b) {
    const std::size_t n = schedule.agent_count();
    if (local_values.size() != n) {
        throw std::invalid_argument("flood_exchange: value count != agent count");
    }
    const double unknown = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> known(n, std::vector<double>(n, unknown));
    std::vector<std::vector<bool>> has(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        known[i][i] = local_values[i];
        has[i][i] = true;
    }

    FloodResult res;
    const int cap = flood_round_cap(schedule, connectivity_window_b);
    int stale_rounds = 0;
    for (int round = 0; round < cap; ++round) {
        auto next_known = known;
        auto next_has = has;
        bool grew = false;
        const SquareMatrix& a = schedule.at_time(round);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || a.at(i, j) == 0.0) continue;
                for (std::size_t v = 0; v < n; ++v) {
                    if (has[j][v] && !next_has[i][v]) {
                        next_has[i][v] = true;
                        next_known[i][v] = known[j][v];
                        grew = true;
                    }
                }
            }
        }
        known.swap(next_known);
        has.swap(next_has);
        res.rounds_used = round + 1;
        bool all = true;
        for (std::size_t i = 0; i < n && all; ++i) {
            for (std::size_t v = 0; v < n; ++v) {
                if (!has[i][v]) {
                    all = false;
                    break;
                }
            }
        }
        if (all) {
            res.complete = true;
            break;
        }
        stale_rounds = grew ? 0 : stale_rounds + 1;
        if (stale_rounds >= static_cast<int>(schedule.period())) {
            break;  // a full stale period on a monotone table is a fixed point
        }
    }

    res.values = std::move(known);
    res.missing.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t v = 0; v < n; ++v) {
            if (!has[i][v]) res.missing[i].push_back(v);
        }
    }
    res.complete = true;
    for (const auto& m : res.missing) {
        if (!m.empty()) res.complete = false;
    }
    return res;
}

std::vector<double> max_consensus(const GraphSchedule& schedule,
                                  std::span<const double> local_values,
                                  int connectivity_window_b) {
    const std::size_t n = schedule.agent_count();
    if (local_values.size() != n) {
        throw std::invalid_argument("max_consensus: value count != agent count");
    }
    std::vector<double> cur(local_values.begin(), local_values.end());
    const int rounds = flood_round_cap(schedule, connectivity_window_b);
    for (int round = 0; round < rounds; ++round) {
        std::vector<double> next = cur;
        const SquareMatrix& a = schedule.at_time(round);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || a.at(i, j) == 0.0) continue;
                next[i] = std::max(next[i], cur[j]);
            }
        }
        cur.swap(next);
    }
    return cur;
}

std::vector<NoiseProfile> exchange_noise_variances(const GraphSchedule& schedule,
                                                   const NoiseProfile& noise,
                                                   int connectivity_window_b) {
    if (noise.size() != schedule.agent_count()) {
        throw std::invalid_argument("exchange_noise_variances: noise size != agent count");
    }
    const FloodResult flood =
        flood_exchange(schedule, noise.variances(), connectivity_window_b);
    if (!flood.complete) {
        std::ostringstream msg;
        msg << "noise exchange incomplete;";
        for (std::size_t i = 0; i < flood.missing.size(); ++i) {
            if (flood.missing[i].empty()) continue;
            msg << " agent " << i << " missing {";
            for (std::size_t k = 0; k < flood.missing[i].size(); ++k) {
                msg << (k ? "," : "") << flood.missing[i][k];
            }
            msg << "}";
        }
        throw std::runtime_error(msg.str());
    }
    std::vector<NoiseProfile> out;
    out.reserve(flood.values.size());
    for (const auto& view : flood.values) out.emplace_back(view);
    return out;
}

DistributedSigmaFResult select_sigma_f_distributed(const GraphSchedule& schedule,
                                                   const NoiseProfile& noise, double start,
                                                   int connectivity_window_b) {
    const std::size_t n = schedule.agent_count();
    const std::vector<NoiseProfile> views =
        exchange_noise_variances(schedule, noise, connectivity_window_b);

    DistributedSigmaFResult out;
    out.per_agent.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.per_agent[i] = select_sigma_f(views[i], start);
    }
    const std::vector<double> agreed = max_consensus(schedule, out.per_agent, connectivity_window_b);
    for (double v : agreed) {
        if (v != agreed[0]) {
            throw std::runtime_error("select_sigma_f_distributed: max consensus disagreement");
        }
    }
    out.agreed = agreed[0];
    out.recheck = check_variance_condition(out.agreed, noise);
    return out;
}

}  // namespace radgpr
