#include "radgpr/distributed_gpr.hpp"

#include <stdexcept>

namespace radgpr {

GlobalPrediction read_global(const ConsensusState& state) {
    const std::size_t m = state.size();
    GlobalPrediction g;
    g.mu_hat.resize(m);
    g.var_hat.resize(m);
    g.var_ave.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (!(state.xi[k] > 0.0)) {
            throw std::runtime_error("read_global: consensus state degenerate");
        }
        g.var_hat[k] = 1.0 / state.xi[k];
        g.mu_hat[k] = g.var_hat[k] * state.theta[k];
        g.var_ave[k] = state.lambda[k];
    }
    return g;
}

PoEResult poe_aggregate(std::span<const double> means, std::span<const double> variances) {
    if (means.size() != variances.size() || means.empty()) {
        throw std::invalid_argument("poe_aggregate: bad expert lists");
    }
    const double n = static_cast<double>(means.size());
    double precision = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (!(variances[i] > 0.0)) {
            throw std::invalid_argument("poe_aggregate: non-positive expert variance");
        }
        precision += 1.0 / variances[i];
        weighted += means[i] / variances[i];
    }
    PoEResult out;
    out.variance = 1.0 / (precision / n);
    out.mean = out.variance / n * weighted;
    return out;
}

PoEField poe_aggregate_field(std::span<const std::vector<double>> means,
                             std::span<const std::vector<double>> variances) {
    if (means.size() != variances.size() || means.empty()) {
        throw std::invalid_argument("poe_aggregate_field: bad expert lists");
    }
    const std::size_t n = means.size();
    const std::size_t m = means[0].size();
    PoEField out;
    out.mean.resize(m);
    out.variance.resize(m);
    std::vector<double> mu(n), var(n);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            mu[i] = means[i][k];
            var[i] = variances[i][k];
        }
        const PoEResult r = poe_aggregate(mu, var);
        out.mean[k] = r.mean;
        out.variance[k] = r.variance;
    }
    return out;
}

}  // namespace radgpr
