#pragma once

#include <span>
#include <vector>

#include "radgpr/distributed_gpr.hpp"
#include "radgpr/geometry.hpp"
#include "radgpr/kernel.hpp"

namespace radgpr {

/// Aligned views of one agent's local prediction on Z_agg.
struct LocalOnAgg {
    std::span<const double> mean;      // μ̌ on Z_agg
    std::span<const double> variance;  // σ̌² on Z_agg
};

/// Indices into Z_agg where both network variance estimates beat the
/// local one strictly: {z : σ̂² < σ̌² and σ̂_ave² < σ̌²}. No tolerance;
/// fp ties fall back to the local prediction.
std::vector<std::size_t> select_active(std::span<const Point> z_agg,
                                       std::span<const double> local_var_on_agg,
                                       const GlobalPrediction& global);

/// Cross-covariance scale g(z*,t) = min{σ̌²_z*, σ̌²_agg}·max{0, c−ψ}/σ_f⁴.
double g_factor(const Kernel& k, const FusionConstants& consts, std::size_t agent,
                double sigma_check_star_sq, double sigma_check_agg_sq);

struct FusePointTrace {
    std::size_t agg_index = 0;  // chosen z_agg* (index into Z_agg)
    double g = 0.0;             // g(z*,t)·k(z*, z_agg*)
    double v = 0.0;
    double mu_prime = 0.0;      // μ̂ − μ̌ at z_agg*
};

struct FusedPoint {
    double mean = 0.0;
    double variance = 0.0;
    FusePointTrace trace;
};

/// Correction of the local prediction at z* from the nearest active
/// common point (ties to the earliest Z_agg index):
///   v  = g(z*,t)·k(z*,z_agg*)·σ̌⁻²_agg
///   μ̃  = v·(μ̂ − μ̌_agg) + μ̌_z*
///   σ̃² = σ̌²_z* + v²·(σ̂²_agg − σ̌²_agg)
FusedPoint fuse_point(std::span<const double> z_star, double local_mean_star,
                      double local_var_star, std::span<const std::size_t> active_set,
                      std::span<const Point> z_agg, const LocalOnAgg& local_on_agg,
                      const GlobalPrediction& global, const Kernel& k,
                      const FusionConstants& consts, std::size_t agent);

struct FusedPrediction {
    std::vector<double> mu_tilde;
    std::vector<double> var_tilde;
    std::vector<std::size_t> active_set;
    std::vector<FusePointTrace> trace;  // empty when the active set is empty
};

/// Whole-test-set fusion. An empty active set returns the local
/// prediction unchanged.
FusedPrediction fuse_all(std::span<const Point> z_star, std::span<const double> local_mean_star,
                         std::span<const double> local_var_star, std::span<const Point> z_agg,
                         const LocalOnAgg& local_on_agg, const GlobalPrediction& global,
                         const Kernel& k, const FusionConstants& consts, std::size_t agent);

}  // namespace radgpr
