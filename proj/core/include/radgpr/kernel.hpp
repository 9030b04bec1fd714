#pragma once

#include <optional>
#include <span>
#include <vector>

#include "radgpr/geometry.hpp"

namespace radgpr {

class GraphSchedule;

enum class KernelFamily { SquaredExponential };

/// Stationary covariance function κ(ρ) with κ(0) = σ_f² and κ
/// positive, bounded by σ_f², and non-increasing in the distance ρ.
class Kernel {
public:
    Kernel(double sigma_f_sq, double lengthscale_sq,
           KernelFamily family = KernelFamily::SquaredExponential);

    double operator()(std::span<const double> z, std::span<const double> z2) const;
    /// κ as a function of the distance ρ alone.
    double at_distance(double rho) const;

    double sigma_f_sq() const { return sigma_f_sq_; }
    double lengthscale_sq() const { return lengthscale_sq_; }
    KernelFamily family() const { return family_; }

    /// Same family and lengthscale, different prior variance.
    Kernel with_sigma_f_sq(double sigma_f_sq) const {
        return Kernel(sigma_f_sq, lengthscale_sq_, family_);
    }

private:
    double sigma_f_sq_;
    double lengthscale_sq_;
    KernelFamily family_;
};

/// Per-agent observation-noise variances (σ_e^[i])².
class NoiseProfile {
public:
    explicit NoiseProfile(std::vector<double> variances);

    const std::vector<double>& variances() const { return variances_; }
    double variance(std::size_t agent) const { return variances_.at(agent); }
    std::size_t size() const { return variances_.size(); }
    double min_variance() const { return min_; }
    double max_variance() const { return max_; }

private:
    std::vector<double> variances_;
    double min_ = 0.0;
    double max_ = 0.0;
};

/// Constants derived from σ_f² and the noise profile that gate the
/// fusion correction: ψ^[i] = σ_f²/(σ_f²+σ_e²), χ^[i] = 1/σ_e² + 1/σ_f²,
/// c = (Σ χψ)/(Σ χ), plus the quantities entering the σ_f² condition.
struct FusionConstants {
    double sigma_f_sq = 0.0;
    std::vector<double> psi;
    std::vector<double> chi;
    double mu_chi = 0.0;
    double sigma_chi_sq = 0.0;  // Σ_i (χ_i + μ_χ)²
    double c = 0.0;
    std::vector<std::size_t> v_plus;  // agents with c·σ_f² − ψ > 0
    std::optional<double> eps_plus;   // min over v_plus of c·σ_f² − ψ

    /// max{0, c − ψ_i}; exactly zero for every agent when the noise is
    /// homogeneous (c is evaluated in anchored-difference form).
    double gate(std::size_t agent) const;

    /// Throws when 𝒱⁺ is empty. Callers growing σ_f² check has_value().
    double require_eps_plus() const;
};

FusionConstants compute_fusion_constants(double sigma_f_sq, const NoiseProfile& noise);

/// Both sides of the prior-variance condition
/// σ_χ²/(μ_χ²·ε_+) ≤ (σ_e^min)²/(σ_e^max)², evaluated at one σ_f².
struct VarianceConditionReport {
    double sigma_f_sq = 0.0;
    bool v_plus_nonempty = false;
    double lhs = 0.0;  // meaningful only when v_plus_nonempty
    double rhs = 0.0;
    bool satisfied = false;
};

VarianceConditionReport check_variance_condition(double sigma_f_sq, const NoiseProfile& noise);

/// Smallest prior variance σ_f² ≥ start found by geometric doubling and
/// bisection (1e-6 relative) that satisfies the variance condition.
/// An empty 𝒱⁺ counts as "violated". Throws after 64 doublings.
double select_sigma_f(const NoiseProfile& noise, double start);

/// Outcome of synchronous value flooding.
struct FloodResult {
    // values[i][j] is agent i's copy of agent j's value (NaN if unknown).
    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::size_t>> missing;  // per agent, unknown ids
    int rounds_used = 0;
    bool complete = false;
};

/// Floodset exchange of one scalar per agent: every round each agent
/// merges the (id, value) tables of its in-neighbors. Runs until the
/// tables stabilize, capped at n·b rounds.
FloodResult flood_exchange(const GraphSchedule& schedule, std::span<const double> local_values,
                           int connectivity_window_b);

/// Flood each agent's noise variance so everyone holds the full
/// profile. Throws with the unreachable agent sets if the exchange
/// cannot complete.
std::vector<NoiseProfile> exchange_noise_variances(const GraphSchedule& schedule,
                                                   const NoiseProfile& noise,
                                                   int connectivity_window_b);

/// Per-agent repeated max over the in-neighborhood; n·b rounds.
std::vector<double> max_consensus(const GraphSchedule& schedule,
                                  std::span<const double> local_values,
                                  int connectivity_window_b);

/// Full distributed selection: flood the noise variances, let every
/// agent pick its σ_f², then agree on the max via max-consensus.
struct DistributedSigmaFResult {
    std::vector<double> per_agent;  // each agent's locally selected σ_f²
    double agreed = 0.0;            // max-consensus result (identical across agents)
    VarianceConditionReport recheck;
};

DistributedSigmaFResult select_sigma_f_distributed(const GraphSchedule& schedule,
                                                   const NoiseProfile& noise, double start,
                                                   int connectivity_window_b);

}  // namespace radgpr
