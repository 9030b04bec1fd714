#include "radgpr/consensus.hpp"

#include <cmath>
#include <stdexcept>

namespace radgpr {

ReferenceSignals signals_from_values(std::span<const double> means,
                                     std::span<const double> variances) {
    if (means.size() != variances.size()) {
        throw std::invalid_argument("signals_from_values: length mismatch");
    }
    ReferenceSignals r;
    r.r_theta.reserve(means.size());
    r.r_xi.reserve(means.size());
    r.r_lambda.reserve(means.size());
    for (std::size_t k = 0; k < means.size(); ++k) {
        if (!(variances[k] > 0.0)) {
            throw std::invalid_argument("signals_from_values: non-positive variance");
        }
        r.r_theta.push_back(means[k] / variances[k]);
        r.r_xi.push_back(1.0 / variances[k]);
        r.r_lambda.push_back(variances[k]);
    }
    return r;
}

ReferenceSignals signals_from_predictions(std::span<const LocalPrediction> on_z_agg) {
    std::vector<double> means(on_z_agg.size()), variances(on_z_agg.size());
    for (std::size_t k = 0; k < on_z_agg.size(); ++k) {
        means[k] = on_z_agg[k].mean;
        variances[k] = on_z_agg[k].variance;
    }
    return signals_from_values(means, variances);
}

ConsensusState init_state(std::size_t z_agg_size, double sigma_f_sq,
                          std::span<const LocalPrediction> first_local_predictions) {
    if (!(sigma_f_sq > 0.0)) {
        throw std::invalid_argument("init_state: sigma_f_sq must be positive");
    }
    if (first_local_predictions.size() != z_agg_size) {
        throw std::invalid_argument("init_state: prediction count != z_agg size");
    }
    const ReferenceSignals r0 = signals_from_predictions(first_local_predictions);

    ConsensusState s;
    s.theta = r0.r_theta;
    s.lambda = r0.r_lambda;
    s.xi.assign(z_agg_size, 0.0);
    s.prev_r.r_theta = r0.r_theta;
    s.prev_r.r_lambda = r0.r_lambda;
    s.prev_r.r_xi.assign(z_agg_size, 0.0);  // ξ's t=−1 signal
    return s;
}

namespace {

void step_field(const std::vector<double>& self, const RoundInput& input, double self_weight,
                const std::vector<double> ConsensusState::* field,
                const std::vector<double>& new_r, const std::vector<double>& prev_r,
                std::vector<double>& out) {
    const std::size_t m = self.size();
    out.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        double acc = self_weight * self[k];
        for (const NeighborContribution& nb : input.neighbors) {
            acc += nb.weight * ((nb.state)->*field)[k];
        }
        out[k] = acc + (new_r[k] - prev_r[k]);
    }
}

void check_lengths(std::size_t m, const RoundInput& input) {
    if (input.new_r.r_theta.size() != m || input.new_r.r_xi.size() != m ||
        input.new_r.r_lambda.size() != m) {
        throw std::invalid_argument("fodac_step: signal length mismatch");
    }
    for (const NeighborContribution& nb : input.neighbors) {
        if (nb.state == nullptr || nb.state->size() != m ||
            nb.state->theta.size() != m || nb.state->lambda.size() != m) {
            throw std::invalid_argument("fodac_step: neighbor state length mismatch");
        }
    }
}

}  // namespace

ConsensusState fodac_step(const ConsensusState& state, const RoundInput& input,
                          double self_weight) {
    const std::size_t m = state.size();
    check_lengths(m, input);

    double row_sum = self_weight;
    for (const NeighborContribution& nb : input.neighbors) row_sum += nb.weight;
    if (std::abs(row_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("fodac_step: weight row does not sum to 1");
    }

    ConsensusState next;
    step_field(state.theta, input, self_weight, &ConsensusState::theta, input.new_r.r_theta,
               state.prev_r.r_theta, next.theta);
    step_field(state.xi, input, self_weight, &ConsensusState::xi, input.new_r.r_xi,
               state.prev_r.r_xi, next.xi);
    step_field(state.lambda, input, self_weight, &ConsensusState::lambda, input.new_r.r_lambda,
               state.prev_r.r_lambda, next.lambda);
    next.prev_r = input.new_r;
    return next;
}

std::vector<double> sum_across_agents(std::span<const ConsensusState> states,
                                      const std::vector<double> ConsensusState::* field) {
    if (states.empty()) return {};
    std::vector<double> sum(states[0].size(), 0.0);
    for (const ConsensusState& s : states) {
        const auto& v = s.*field;
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += v[k];
    }
    return sum;
}

std::vector<double> sum_across_agents(std::span<const ReferenceSignals> signals,
                                      const std::vector<double> ReferenceSignals::* field) {
    if (signals.empty()) return {};
    std::vector<double> sum((signals[0].*field).size(), 0.0);
    for (const ReferenceSignals& s : signals) {
        const auto& v = s.*field;
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += v[k];
    }
    return sum;
}

double xi_spread(std::span<const ConsensusState> states) {
    if (states.empty()) return 0.0;
    const std::size_t m = states[0].size();
    double spread = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        double lo = states[0].xi[k], hi = states[0].xi[k];
        for (const ConsensusState& s : states) {
            lo = std::min(lo, s.xi[k]);
            hi = std::max(hi, s.xi[k]);
        }
        spread = std::max(spread, hi - lo);
    }
    return spread;
}

double tracking_envelope(double sigma_f_sq, double zeta, std::size_t n, int b, double delta_m_1,
                         int t) {
    const double horizon = static_cast<double>(n) * b - 1.0;
    const double exponent = static_cast<double>(t) / horizon - 1.0;
    return 2.0 * sigma_f_sq * sigma_f_sq * std::pow(1.0 - zeta, exponent) * delta_m_1;
}

}  // namespace radgpr
