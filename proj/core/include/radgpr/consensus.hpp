#pragma once

#include <span>
#include <vector>

#include "radgpr/local_gpr.hpp"

namespace radgpr {

/// The three per-point reference signals fed to the consensus machine:
/// r_θ = μ̌/σ̌², r_ξ = 1/σ̌², r_λ = σ̌², each as a vector over Z_agg.
struct ReferenceSignals {
    std::vector<double> r_theta;
    std::vector<double> r_xi;
    std::vector<double> r_lambda;
};

ReferenceSignals signals_from_predictions(std::span<const LocalPrediction> on_z_agg);
ReferenceSignals signals_from_values(std::span<const double> means,
                                     std::span<const double> variances);

/// One agent's dynamic-average-consensus state over Z_agg, together
/// with the previous round's reference signals (for the Δr term).
struct ConsensusState {
    std::vector<double> theta;
    std::vector<double> xi;
    std::vector<double> lambda;
    ReferenceSignals prev_r;

    std::size_t size() const { return xi.size(); }
};

struct NeighborContribution {
    double weight = 0.0;               // a_ij(t−1)
    const ConsensusState* state = nullptr;
};

struct RoundInput {
    std::vector<NeighborContribution> neighbors;
    ReferenceSignals new_r;
};

/// State before the first data round: ξ = 0 with its t=−1 signal 0,
/// θ and λ equal to their prior-only signals (so their first Δ is the
/// change from the prior, and ξ's first Δ is the full current signal).
ConsensusState init_state(std::size_t z_agg_size, double sigma_f_sq,
                          std::span<const LocalPrediction> first_local_predictions);

/// One first-order dynamic-average-consensus step:
///   x_i(t) = Σ_j a_ij(t−1)·x_j(t−1) + (r_i(t) − r_i(t−1))
/// applied elementwise to θ, ξ, λ. The weight row must sum to 1.
ConsensusState fodac_step(const ConsensusState& state, const RoundInput& input,
                          double self_weight);

/// Elementwise sums across agents, for the conservation identity
/// Σ_i x_i(t) = Σ_i r_i(t).
std::vector<double> sum_across_agents(std::span<const ConsensusState> states,
                                      const std::vector<double> ConsensusState::* field);
std::vector<double> sum_across_agents(std::span<const ReferenceSignals> signals,
                                      const std::vector<double> ReferenceSignals::* field);

/// ‖max_i ξ_i − min_i ξ_i‖_∞, the spread driving the tracking-error
/// envelope.
double xi_spread(std::span<const ConsensusState> states);

/// Envelope 2σ_f⁴(1−ζ)^(t/(nb−1)−1)·δ_m bounding |σ̂² − σ_agg²| decay
/// with frozen signals; an upper envelope, not an exact rate.
double tracking_envelope(double sigma_f_sq, double zeta, std::size_t n, int b, double delta_m_1,
                         int t);

}  // namespace radgpr
