#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "radgpr/consensus.hpp"
#include "radgpr/netgraph.hpp"
#include "radgpr/rng.hpp"

using namespace radgpr;
using helpers::alternating_schedule;

namespace {

std::vector<LocalPrediction> prior_predictions(std::size_t m, double sigma_f_sq) {
    std::vector<LocalPrediction> out(m);
    for (auto& p : out) {
        p.mean = 0.0;
        p.variance = sigma_f_sq;
    }
    return out;
}

// Run the machine for all agents with per-agent constant signals.
std::vector<ConsensusState> run_constant_signals(const GraphSchedule& g,
                                                 const std::vector<ReferenceSignals>& r,
                                                 std::vector<ConsensusState> states,
                                                 int rounds, int first_round = 1) {
    const std::size_t n = states.size();
    for (int t = first_round; t < first_round + rounds; ++t) {
        const SquareMatrix& a = g.at_time(t - 1);
        std::vector<ConsensusState> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            RoundInput input;
            input.new_r = r[i];
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && a.at(i, j) != 0.0) {
                    input.neighbors.push_back(NeighborContribution{a.at(i, j), &states[j]});
                }
            }
            next[i] = fodac_step(states[i], input, a.at(i, i));
        }
        states.swap(next);
    }
    return states;
}

}  // namespace

TEST_CASE("initial state") {
    SUBCASE("prior-only signals at unit prior variance") {
        const auto preds = prior_predictions(3, 1.0);
        const ConsensusState s = init_state(3, 1.0, preds);
        CHECK(s.theta == std::vector<double>{0.0, 0.0, 0.0});
        CHECK(s.xi == std::vector<double>{0.0, 0.0, 0.0});
        CHECK(s.lambda == std::vector<double>{1.0, 1.0, 1.0});
        CHECK(s.prev_r.r_xi == std::vector<double>{0.0, 0.0, 0.0});
        CHECK(s.prev_r.r_theta == s.theta);
        CHECK(s.prev_r.r_lambda == s.lambda);
        // The distribution the signals came from: r_xi(0) = 1/sigma_f^2.
        const ReferenceSignals r0 = signals_from_predictions(preds);
        CHECK(r0.r_xi == std::vector<double>{1.0, 1.0, 1.0});
    }

    SUBCASE("identical across prior-only agents") {
        const auto preds = prior_predictions(4, 2.0);
        const ConsensusState a = init_state(4, 2.0, preds);
        const ConsensusState b = init_state(4, 2.0, preds);
        CHECK(a.theta == b.theta);
        CHECK(a.xi == b.xi);
        CHECK(a.lambda == b.lambda);
    }

    SUBCASE("empty aggregation set is a no-op machine") {
        const ConsensusState s = init_state(0, 1.0, {});
        CHECK(s.size() == 0);
        const ConsensusState s2 = fodac_step(s, RoundInput{}, 1.0);
        CHECK(s2.size() == 0);
    }
}

TEST_CASE("one averaging step between two agents") {
    std::vector<LocalPrediction> pa(1), pb(1);
    pa[0] = {0.0, 1.0, {}, 0.0};
    pb[0] = {2.0, 1.0, {}, 0.0};
    ConsensusState sa = init_state(1, 1.0, pa);
    ConsensusState sb = init_state(1, 1.0, pb);
    // theta starts at r_theta(0): 0 and 2. One step with equal weights
    // and unchanged signals averages them.
    CHECK(sa.theta[0] == 0.0);
    CHECK(sb.theta[0] == 2.0);

    RoundInput in_a{{{0.5, &sb}}, ReferenceSignals{{0.0}, {1.0}, {1.0}}};
    RoundInput in_b{{{0.5, &sa}}, ReferenceSignals{{2.0}, {1.0}, {1.0}}};
    const ConsensusState na = fodac_step(sa, in_a, 0.5);
    const ConsensusState nb = fodac_step(sb, in_b, 0.5);
    CHECK(na.theta[0] == 1.0);
    CHECK(nb.theta[0] == 1.0);
}

TEST_CASE("single agent tracks its own signal exactly") {
    std::vector<LocalPrediction> p(2);
    p[0] = {0.0, 1.0, {}, 0.0};
    p[1] = {0.0, 1.0, {}, 0.0};
    ConsensusState s = init_state(2, 1.0, p);
    Rng rng(5);
    ReferenceSignals r{{0.0, 0.0}, {1.0, 1.0}, {1.0, 1.0}};
    for (int t = 1; t <= 50; ++t) {
        r.r_theta[0] += rng.uniform();
        r.r_theta[1] -= rng.uniform();
        r.r_xi[0] += rng.uniform();
        r.r_xi[1] += rng.uniform();
        r.r_lambda[0] = 1.0 / r.r_xi[0];
        r.r_lambda[1] = 1.0 / r.r_xi[1];
        s = fodac_step(s, RoundInput{{}, r}, 1.0);
        for (int kdx = 0; kdx < 2; ++kdx) {
            CHECK(oracles::rel_diff(s.xi[kdx], r.r_xi[kdx]) < 1e-12);
            CHECK(oracles::rel_diff(s.theta[kdx], r.r_theta[kdx]) < 1e-12);
            CHECK(oracles::rel_diff(s.lambda[kdx], r.r_lambda[kdx]) < 1e-12);
        }
    }
}

TEST_CASE("weight row must sum to one") {
    std::vector<LocalPrediction> p(1);
    p[0] = {0.0, 1.0, {}, 0.0};
    ConsensusState a = init_state(1, 1.0, p);
    ConsensusState b = init_state(1, 1.0, p);
    RoundInput input{{{0.6, &b}}, ReferenceSignals{{0.0}, {1.0}, {1.0}}};
    CHECK_THROWS_AS(fodac_step(a, input, 0.5), std::invalid_argument);

    RoundInput bad_len{{{0.5, &b}}, ReferenceSignals{{0.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}}};
    CHECK_THROWS_AS(fodac_step(a, bad_len, 0.5), std::invalid_argument);
}

TEST_CASE("constant signals converge to the network average on the alternating schedule") {
    const GraphSchedule g = alternating_schedule();
    const std::size_t n = 4;
    Rng rng(42);
    std::vector<ReferenceSignals> r(n);
    std::vector<ConsensusState> states;
    std::vector<double> expected_xi(2, 0.0), expected_theta(2, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<LocalPrediction> p(2);
        for (auto& lp : p) {
            lp.mean = rng.normal();
            lp.variance = 0.2 + rng.uniform();
        }
        r[i] = signals_from_predictions(p);
        states.push_back(init_state(2, 1.0, prior_predictions(2, 1.0)));
        for (int kdx = 0; kdx < 2; ++kdx) {
            expected_xi[kdx] += r[i].r_xi[kdx] / n;
            expected_theta[kdx] += r[i].r_theta[kdx] / n;
        }
    }
    states = run_constant_signals(g, r, std::move(states), 200);
    for (std::size_t i = 0; i < n; ++i) {
        for (int kdx = 0; kdx < 2; ++kdx) {
            CHECK(std::abs(states[i].xi[kdx] - expected_xi[kdx]) < 1e-6);
            CHECK(std::abs(states[i].theta[kdx] - expected_theta[kdx]) < 1e-6);
        }
    }
}

TEST_CASE("sums across agents track the signal sums exactly") {
    const GraphSchedule g = alternating_schedule();
    const std::size_t n = 4;
    Rng rng(7);
    std::vector<ConsensusState> states(n, init_state(3, 1.0, prior_predictions(3, 1.0)));
    std::vector<ReferenceSignals> r(n);
    for (auto& ri : r) {
        ri.r_theta.assign(3, 0.0);
        ri.r_xi.assign(3, 1.0);
        ri.r_lambda.assign(3, 1.0);
    }

    for (int t = 1; t <= 300; ++t) {
        // Monotone non-decreasing precision signals, like a growing dataset.
        for (auto& ri : r) {
            for (int kdx = 0; kdx < 3; ++kdx) {
                ri.r_xi[kdx] += rng.uniform() * 0.5;
                ri.r_lambda[kdx] = 1.0 / ri.r_xi[kdx];
                ri.r_theta[kdx] = ri.r_xi[kdx] * rng.normal();
            }
        }
        const SquareMatrix& a = g.at_time(t - 1);
        std::vector<ConsensusState> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            RoundInput input;
            input.new_r = r[i];
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && a.at(i, j) != 0.0) {
                    input.neighbors.push_back(NeighborContribution{a.at(i, j), &states[j]});
                }
            }
            next[i] = fodac_step(states[i], input, a.at(i, i));
        }
        states.swap(next);

        const auto sum_xi = sum_across_agents(std::span<const ConsensusState>(states),
                                              &ConsensusState::xi);
        const auto sum_r_xi = sum_across_agents(std::span<const ReferenceSignals>(r),
                                                &ReferenceSignals::r_xi);
        for (int kdx = 0; kdx < 3; ++kdx) {
            CHECK(std::abs(sum_xi[kdx] - sum_r_xi[kdx]) <= 1e-9 * std::abs(sum_r_xi[kdx]));
        }
        // Monotone signals keep xi at or above the prior precision.
        for (const auto& s : states) {
            for (double x : s.xi) CHECK(x >= 1.0 - 1e-12);
        }
    }
}

TEST_CASE("frozen signals stay under the tracking envelope") {
    const GraphSchedule g = alternating_schedule();
    const ValidationReport rep = validate(g);
    REQUIRE(rep.ok);
    const std::size_t n = 4;
    Rng rng(13);

    std::vector<ReferenceSignals> r(n);
    std::vector<ConsensusState> states;
    double avg_xi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<LocalPrediction> p(1);
        p[0].mean = rng.normal();
        p[0].variance = 0.3 + rng.uniform();
        r[i] = signals_from_predictions(p);
        avg_xi += r[i].r_xi[0] / n;
        states.push_back(init_state(1, 1.0, prior_predictions(1, 1.0)));
    }

    // One step injects the frozen signals; afterwards the spread must
    // obey the geometric envelope until the fp floor.
    states = run_constant_signals(g, r, std::move(states), 1, 1);
    const double delta_m_1 = xi_spread(states);
    for (int t = 1; t <= 60; ++t) {
        double worst = 0.0;
        for (const auto& s : states) worst = std::max(worst, std::abs(s.xi[0] - avg_xi));
        if (worst > 1e-12) {
            CHECK(worst <= tracking_envelope(1.0, rep.zeta, n, rep.b, delta_m_1, t));
        }
        states = run_constant_signals(g, r, std::move(states), 1, t + 1);
    }
}
