#include "radgpr/fused_gpr.hpp"

#include <algorithm>
#include <stdexcept>

namespace radgpr {

std::vector<std::size_t> select_active(std::span<const Point> z_agg,
                                       std::span<const double> local_var_on_agg,
                                       const GlobalPrediction& global) {
    const std::size_t m = z_agg.size();
    if (local_var_on_agg.size() != m || global.size() != m) {
        throw std::invalid_argument("select_active: length mismatch");
    }
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < m; ++k) {
        if (global.var_hat[k] < local_var_on_agg[k] && global.var_ave[k] < local_var_on_agg[k]) {
            active.push_back(k);
        }
    }
    return active;
}

double g_factor(const Kernel& k, const FusionConstants& consts, std::size_t agent,
                double sigma_check_star_sq, double sigma_check_agg_sq) {
    if (!(sigma_check_star_sq > 0.0) || !(sigma_check_agg_sq > 0.0)) {
        throw std::invalid_argument("g_factor: variances must be positive");
    }
    const double k_star_star = k.sigma_f_sq();  // κ(0)
    return std::min(sigma_check_star_sq, sigma_check_agg_sq) * consts.gate(agent) /
           (k_star_star * k_star_star);
}

FusedPoint fuse_point(std::span<const double> z_star, double local_mean_star,
                      double local_var_star, std::span<const std::size_t> active_set,
                      std::span<const Point> z_agg, const LocalOnAgg& local_on_agg,
                      const GlobalPrediction& global, const Kernel& k,
                      const FusionConstants& consts, std::size_t agent) {
    if (active_set.empty()) {
        throw std::invalid_argument("fuse_point: empty active set");
    }
    // proj(z*, active): minimum distance, ties to the earliest Z_agg index.
    std::size_t best = active_set[0];
    double best_d2 = squared_distance(z_agg[best], z_star);
    for (std::size_t idx = 1; idx < active_set.size(); ++idx) {
        const std::size_t cand = active_set[idx];
        const double d2 = squared_distance(z_agg[cand], z_star);
        if (d2 < best_d2) {
            best = cand;
            best_d2 = d2;
        }
    }

    const double g_scale =
        g_factor(k, consts, agent, local_var_star, local_on_agg.variance[best]);
    const double g_star = g_scale * k(z_star, z_agg[best]);
    const double v = g_star / local_on_agg.variance[best];
    const double mu_prime = global.mu_hat[best] - local_on_agg.mean[best];

    FusedPoint out;
    out.mean = v * mu_prime + local_mean_star;
    out.variance =
        local_var_star + v * v * (global.var_hat[best] - local_on_agg.variance[best]);
    out.trace = FusePointTrace{best, g_star, v, mu_prime};
    return out;
}

FusedPrediction fuse_all(std::span<const Point> z_star, std::span<const double> local_mean_star,
                         std::span<const double> local_var_star, std::span<const Point> z_agg,
                         const LocalOnAgg& local_on_agg, const GlobalPrediction& global,
                         const Kernel& k, const FusionConstants& consts, std::size_t agent) {
    FusedPrediction out;
    out.active_set = select_active(z_agg, local_on_agg.variance, global);
    if (out.active_set.empty()) {
        out.mu_tilde.assign(local_mean_star.begin(), local_mean_star.end());
        out.var_tilde.assign(local_var_star.begin(), local_var_star.end());
        return out;
    }
    const std::size_t m = z_star.size();
    out.mu_tilde.resize(m);
    out.var_tilde.resize(m);
    out.trace.resize(m);
    for (std::size_t p = 0; p < m; ++p) {
        const FusedPoint fp =
            fuse_point(z_star[p], local_mean_star[p], local_var_star[p], out.active_set, z_agg,
                       local_on_agg, global, k, consts, agent);
        out.mu_tilde[p] = fp.mean;
        out.var_tilde[p] = fp.variance;
        out.trace[p] = fp.trace;
    }
    return out;
}

}  // namespace radgpr
