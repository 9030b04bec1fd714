#pragma once

#include <functional>
#include <span>
#include <vector>

#include "radgpr/geometry.hpp"
#include "radgpr/kernel.hpp"

namespace radgpr {

/// Prior mean μ(z). An empty function means μ ≡ 0.
using PriorMean = std::function<double(std::span<const double>)>;

struct LocalPrediction {
    double mean = 0.0;
    double variance = 0.0;
    Point nearest;                 // the training input the prediction conditioned on
    double nearest_distance = 0.0;
};

struct NearestSample {
    std::size_t index = 0;
    double distance = 0.0;
};

/// Append-only streaming dataset of one agent. Inputs are unique
/// (exact coordinate equality); duplicates are rejected.
class AgentDataset {
public:
    AgentDataset(int agent_id, double noise_variance);

    void append(Point z, double y);

    /// Exact coordinate equality against an existing input.
    bool contains(std::span<const double> z) const;

    std::size_t size() const { return inputs_.size(); }
    bool empty() const { return inputs_.empty(); }
    int agent_id() const { return agent_id_; }
    double noise_variance() const { return noise_var_; }
    const Point& input(std::size_t i) const { return inputs_[i]; }
    double output(std::size_t i) const { return outputs_[i]; }
    const std::vector<Point>& inputs() const { return inputs_; }

    /// Minimum-distance training input; ties break to the earliest
    /// insertion index. Throws on an empty dataset.
    NearestSample nearest(std::span<const double> z_star) const;

private:
    std::vector<Point> inputs_;
    std::vector<double> outputs_;
    int agent_id_;
    double noise_var_;
};

/// Nearest-neighbor GPR: condition on the single closest sample.
///   μ̌  = μ(z*) + k(z*,zₙ)·(k(zₙ,zₙ)+σ_e²)⁻¹·(yₙ − μ(zₙ))
///   σ̌² = k(z*,z*) − k(z*,zₙ)²·(k(zₙ,zₙ)+σ_e²)⁻¹
LocalPrediction predict(const AgentDataset& ds, const Kernel& k, std::span<const double> z_star,
                        const PriorMean& prior_mean = {});

/// The same conditioning given an already-selected sample; lets the
/// pooled baseline use each sample's own noise variance.
LocalPrediction predict_from_sample(const Kernel& k, std::span<const double> z_star,
                                    const Point& z_n, double y_n, double noise_var,
                                    const PriorMean& prior_mean = {});

/// The no-data prediction (μ(z*), k(z*,z*)); the consensus machine is
/// seeded from these before the first sample arrives.
LocalPrediction prior_prediction(const Kernel& k, std::span<const double> z_star,
                                 const PriorMean& prior_mean = {});

/// Grid approximation of the dispersion sup_z ρ(z, inputs): the max
/// over probe points of the distance to the dataset.
double dispersion(const AgentDataset& ds, std::span<const Point> probe_grid);

}  // namespace radgpr
