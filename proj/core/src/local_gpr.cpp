#include "radgpr/local_gpr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace radgpr {

AgentDataset::AgentDataset(int agent_id, double noise_variance)
    : agent_id_(agent_id), noise_var_(noise_variance) {
    if (!(noise_variance > 0.0)) {
        throw std::invalid_argument("AgentDataset: noise variance must be positive");
    }
}

void AgentDataset::append(Point z, double y) {
    if (contains(z)) {
        throw std::invalid_argument("AgentDataset::append: repetitive sample");
    }
    inputs_.push_back(std::move(z));
    outputs_.push_back(y);
}

bool AgentDataset::contains(std::span<const double> z) const {
    for (const Point& existing : inputs_) {
        if (existing.size() == z.size() &&
            std::equal(existing.begin(), existing.end(), z.begin())) {
            return true;
        }
    }
    return false;
}

NearestSample AgentDataset::nearest(std::span<const double> z_star) const {
    if (inputs_.empty()) {
        throw std::runtime_error("AgentDataset::nearest: empty dataset");
    }
    NearestSample best{0, squared_distance(inputs_[0], z_star)};
    for (std::size_t i = 1; i < inputs_.size(); ++i) {
        const double d2 = squared_distance(inputs_[i], z_star);
        if (d2 < best.distance) {
            best.index = i;
            best.distance = d2;
        }
    }
    best.distance = std::sqrt(best.distance);
    return best;
}

LocalPrediction predict(const AgentDataset& ds, const Kernel& k, std::span<const double> z_star,
                        const PriorMean& prior_mean) {
    const NearestSample ns = ds.nearest(z_star);
    LocalPrediction out = predict_from_sample(k, z_star, ds.input(ns.index),
                                              ds.output(ns.index), ds.noise_variance(),
                                              prior_mean);
    out.nearest_distance = ns.distance;
    return out;
}

LocalPrediction predict_from_sample(const Kernel& k, std::span<const double> z_star,
                                    const Point& z_n, double y_n, double noise_var,
                                    const PriorMean& prior_mean) {
    const double mu_star = prior_mean ? prior_mean(z_star) : 0.0;
    const double mu_n = prior_mean ? prior_mean(z_n) : 0.0;
    const double k_star_n = k(z_star, z_n);
    const double denom = k(z_n, z_n) + noise_var;

    LocalPrediction out;
    out.mean = mu_star + k_star_n / denom * (y_n - mu_n);
    out.variance = k(z_star, z_star) - k_star_n * k_star_n / denom;
    out.nearest = z_n;
    out.nearest_distance = distance(z_star, z_n);
    return out;
}

LocalPrediction prior_prediction(const Kernel& k, std::span<const double> z_star,
                                 const PriorMean& prior_mean) {
    LocalPrediction out;
    out.mean = prior_mean ? prior_mean(z_star) : 0.0;
    out.variance = k(z_star, z_star);
    out.nearest_distance = std::numeric_limits<double>::infinity();
    return out;
}

double dispersion(const AgentDataset& ds, std::span<const Point> probe_grid) {
    if (probe_grid.empty()) {
        throw std::invalid_argument("dispersion: empty probe grid");
    }
    if (ds.empty()) {
        throw std::runtime_error("dispersion: empty dataset");
    }
    double worst = 0.0;
    for (const Point& p : probe_grid) {
        worst = std::max(worst, ds.nearest(p).distance);
    }
    return worst;
}

}  // namespace radgpr
