#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "radgpr/consensus.hpp"
#include "radgpr/distributed_gpr.hpp"
#include "radgpr/fused_gpr.hpp"
#include "radgpr/geometry.hpp"
#include "radgpr/kernel.hpp"
#include "radgpr/local_gpr.hpp"
#include "radgpr/netgraph.hpp"
#include "radgpr/rng.hpp"

namespace radgpr {

using LatentFn = std::function<double(std::span<const double>)>;

/// Named latent functions usable from config files: "sin_cos"
/// (sin(z1)+cos(z2)), "zero", "linear_x".
LatentFn make_latent(const std::string& name);

enum class BoundaryRule { Clamp, Reflect };
enum class SigmaFMode { Fixed, Selected };

struct MotionModel {
    double step_stddev = 1.0;
    BoundaryRule boundary = BoundaryRule::Clamp;
};

struct SimConfig {
    std::size_t n_agents = 0;
    int rounds = 0;
    Box domain;
    std::string latent = "sin_cos";
    std::vector<double> noise_variances;
    double sigma_f_sq = 1.0;
    double lengthscale_sq = 0.5;
    SigmaFMode sigma_f_mode = SigmaFMode::Fixed;
    int test_points_per_axis = 40;
    int agg_stride = 2;
    std::vector<SquareMatrix> schedule_matrices;
    MotionModel motion;
    std::uint64_t seed = 1;
    /// Stop sampling after this round; consensus keeps running on the
    /// frozen datasets.
    std::optional<int> freeze_data_at;
    int threads = 1;
};

struct MetricsRow {
    int t = 0;
    int agent = 0;
    double err_local = 0.0;    // mean |μ̌ − η| over Z*
    double err_fused = 0.0;    // mean |μ̃ − η| over Z*
    double err_central = 0.0;  // mean |μ_c − η| over Z* (pooled baseline)
    double var_local_avg = 0.0;
    double var_fused_avg = 0.0;
    double dispersion = 0.0;
    double consensus_residual = 0.0;
};

/// One agent's per-round fields over the test grid.
struct AgentRoundData {
    std::vector<double> local_mean;
    std::vector<double> local_var;
    std::vector<double> local_nearest_dist;
    GlobalPrediction global;
    FusedPrediction fused;
};

struct RoundObservation {
    int t = 0;
    const std::vector<AgentDataset>* datasets = nullptr;
    const std::vector<ConsensusState>* states = nullptr;       // after this round's step
    const std::vector<ReferenceSignals>* signals = nullptr;    // r(t)
    const std::vector<AgentRoundData>* agents = nullptr;
    const std::vector<Point>* z_star = nullptr;
    const std::vector<std::size_t>* agg_indices = nullptr;
    const std::vector<double>* central_mean = nullptr;
    const std::vector<double>* central_var = nullptr;
    const std::vector<double>* eta_on_star = nullptr;
};

using RoundObserver = std::function<void(const RoundObservation&)>;

struct SimResult {
    std::vector<MetricsRow> metrics;
    Grid test_grid;
    std::vector<std::size_t> agg_indices;
    std::vector<double> eta_on_star;
    std::vector<AgentRoundData> final_agents;
    std::vector<double> final_central_mean;
    std::vector<double> final_central_var;
    double sigma_f_sq_used = 0.0;
    ValidationReport schedule_report;
};

/// The full synchronous pipeline, one round per time step and per
/// agent: sample → append → local GPR on Z* → consensus step on Z_agg
/// → network prediction → fusion on Z*, plus the pooled
/// nearest-neighbor baseline over everybody's data.
SimResult run(const SimConfig& cfg, const RoundObserver& observer = {});

/// Brownian step: pos + N(0, step_stddev²·I), folded back into the
/// domain by the boundary rule.
Point step_trajectory(const Point& pos, Rng& rng, const MotionModel& motion, const Box& domain);

/// y = η(pos) + N(0, noise_var).
double observe(const LatentFn& eta, std::span<const double> pos, double noise_var, Rng& rng);

struct LipschitzEstimate {
    double ell_eta = 0.0;
};

/// Max finite-difference slope over grid neighbor pairs (axis and
/// diagonal offsets).
LipschitzEstimate estimate_lipschitz(const LatentFn& eta, const Grid& probe);

/// Monte Carlo check of the local-GPR mean-error concentration bound
///   |μ̌ − η(z*)| ≤ (1 − κ(d)/(σ_f²+σ_e²))·‖η‖ + ℓ_η·d + ε,
/// which holds per draw with probability ≥ 1 − (σ_e^max)²/ε². Input
/// geometry is fixed; outputs are redrawn per realization.
struct MeanBoundCheck {
    double violation_rate = 0.0;
    double chebyshev_bound = 0.0;  // (σ_e^max)²/ε²
    std::size_t samples_checked = 0;
    std::size_t violations = 0;
    double eta_sup = 0.0;
    double lipschitz = 0.0;
};

MeanBoundCheck mean_bound_violation_rate(const std::vector<std::vector<Point>>& agent_inputs,
                                         const Kernel& k, const NoiseProfile& noise,
                                         const LatentFn& eta, const Grid& probe, double epsilon,
                                         int realizations, std::uint64_t seed);

}  // namespace radgpr
