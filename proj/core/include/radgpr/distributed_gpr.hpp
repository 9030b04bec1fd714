#pragma once

#include <span>
#include <vector>

#include "radgpr/consensus.hpp"

namespace radgpr {

/// One agent's network-level prediction on Z_agg, read off its
/// consensus state: σ̂² = 1/ξ, μ̂ = σ̂²·θ, σ̂_ave² = λ.
struct GlobalPrediction {
    std::vector<double> mu_hat;
    std::vector<double> var_hat;
    std::vector<double> var_ave;

    std::size_t size() const { return var_hat.size(); }
};

GlobalPrediction read_global(const ConsensusState& state);

/// Product-of-experts aggregation of n Gaussian experts:
///   σ_agg⁻² = (1/n) Σ σ̌⁻²,  μ_agg = (σ_agg²/n) Σ σ̌⁻²·μ̌.
/// Centralized; used as the convergence oracle and by the baseline.
struct PoEResult {
    double mean = 0.0;
    double variance = 0.0;
};

PoEResult poe_aggregate(std::span<const double> means, std::span<const double> variances);

/// PoE per point across agents; predictions[agent][point].
struct PoEField {
    std::vector<double> mean;
    std::vector<double> variance;
};

PoEField poe_aggregate_field(std::span<const std::vector<double>> means,
                             std::span<const std::vector<double>> variances);

}  // namespace radgpr
