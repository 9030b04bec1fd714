#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "radgpr/distributed_gpr.hpp"
#include "radgpr/local_gpr.hpp"
#include "radgpr/netgraph.hpp"
#include "radgpr/rng.hpp"

using namespace radgpr;
using helpers::alternating_schedule;

TEST_CASE("reading the network prediction off the consensus state") {
    ConsensusState s;
    s.theta = {0.0, 3.0};
    s.xi = {1.0, 2.0};
    s.lambda = {1.0, 0.25};
    const GlobalPrediction g = read_global(s);
    CHECK(g.var_hat == std::vector<double>{1.0, 0.5});
    CHECK(g.mu_hat == std::vector<double>{0.0, 1.5});
    CHECK(g.var_ave == std::vector<double>{1.0, 0.25});

    s.xi[1] = 0.0;
    CHECK_THROWS_WITH_AS(read_global(s), "read_global: consensus state degenerate",
                         std::runtime_error);
}

TEST_CASE("product of experts") {
    SUBCASE("identical experts return themselves") {
        const std::vector<double> mu{0.8, 0.8, 0.8};
        const std::vector<double> var{0.3, 0.3, 0.3};
        const PoEResult r = poe_aggregate(mu, var);
        CHECK(r.mean == doctest::Approx(0.8).epsilon(1e-15));
        CHECK(r.variance == doctest::Approx(0.3).epsilon(1e-15));
    }

    SUBCASE("two experts, equal variance") {
        const PoEResult r = poe_aggregate(std::vector<double>{0.0, 2.0},
                                          std::vector<double>{1.0, 1.0});
        CHECK(r.mean == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.variance == doctest::Approx(1.0).epsilon(1e-15));
    }

    SUBCASE("two experts, unequal variance") {
        const PoEResult r = poe_aggregate(std::vector<double>{0.0, 0.0},
                                          std::vector<double>{1.0, 0.5});
        CHECK(r.variance == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    }

    SUBCASE("rejects non-positive variances") {
        CHECK_THROWS_AS(
            poe_aggregate(std::vector<double>{0.0}, std::vector<double>{0.0}),
            std::invalid_argument);
    }
}

TEST_CASE("convexity orderings of the aggregate") {
    Rng rng(55);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + (rng.next_u64() % 6);
        std::vector<double> mu(n), var(n), x(n);
        const double sf2 = 1.0 + rng.uniform(0.0, 3.0);
        for (std::size_t i = 0; i < n; ++i) {
            mu[i] = rng.normal();
            x[i] = 0.01 + rng.uniform(0.0, 2.0);  // noise variances
            var[i] = sf2 - sf2 * sf2 / (sf2 + x[i]);
        }
        const PoEResult agg = poe_aggregate(mu, var);

        // 1/x is convex: the aggregate can never exceed the mean variance.
        double mean_var = 0.0;
        for (double v : var) mean_var += v / n;
        CHECK(agg.variance <= mean_var * (1 + 1e-12));

        // f2(x) = sf2 - sf2^2/(sf2+x) is concave: f2(mean x) >= mean f2(x).
        double mean_x = 0.0;
        for (double v : x) mean_x += v / n;
        const double f2_mean = sf2 - sf2 * sf2 / (sf2 + mean_x);
        CHECK(f2_mean >= mean_var * (1 - 1e-12));

        // And the inverse flips it: (mean f2)^-1 <= mean f2^-1.
        double mean_inv = 0.0;
        for (double v : var) mean_inv += (1.0 / v) / n;
        CHECK(1.0 / mean_var <= mean_inv * (1 + 1e-12));
    }
}

TEST_CASE("aggregate variance sandwich on random datasets") {
    Rng rng(66);
    const Kernel k(1.5, 0.8);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + (rng.next_u64() % 4);
        std::vector<double> mu(n), var(n), noise(n), rho(n);
        for (std::size_t i = 0; i < n; ++i) {
            noise[i] = 0.05 + rng.uniform(0.0, 0.5);
            AgentDataset ds(static_cast<int>(i), noise[i]);
            const std::size_t count = 1 + (rng.next_u64() % 10);
            for (std::size_t s = 0; s < count; ++s) {
                ds.append({rng.uniform(-3, 3), rng.uniform(-3, 3)}, rng.normal());
            }
            const Point z{0.3, -0.7};
            const LocalPrediction p = predict(ds, k, z);
            mu[i] = p.mean;
            var[i] = p.variance;
            rho[i] = ds.nearest(z).distance;
        }
        const PoEResult agg = poe_aggregate(mu, var);

        const double sf2 = k.sigma_f_sq();
        double se_min = noise[0], se_max = noise[0];
        for (double v : noise) {
            se_min = std::min(se_min, v);
            se_max = std::max(se_max, v);
        }
        const double lower = sf2 * se_min / (sf2 + se_min);
        double kappa_mean_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double kv = k.at_distance(rho[i]);
            kappa_mean_sq += kv * kv / static_cast<double>(n);
        }
        const double upper = sf2 - kappa_mean_sq / (sf2 + se_max);
        CHECK(agg.variance >= lower * (1 - 1e-12));
        CHECK(agg.variance <= upper * (1 + 1e-12));
    }
}

TEST_CASE("consensus prediction converges to the aggregate with frozen data") {
    const GraphSchedule g = alternating_schedule();
    const std::size_t n = 4;
    Rng rng(77);

    // Frozen per-agent local predictions on a 3-point aggregation set.
    std::vector<std::vector<double>> means(n), vars(n);
    std::vector<ReferenceSignals> r(n);
    std::vector<ConsensusState> states;
    for (std::size_t i = 0; i < n; ++i) {
        means[i].resize(3);
        vars[i].resize(3);
        for (int kdx = 0; kdx < 3; ++kdx) {
            means[i][kdx] = rng.normal();
            vars[i][kdx] = 0.2 + rng.uniform();
        }
        r[i] = signals_from_values(means[i], vars[i]);
        std::vector<LocalPrediction> prior(3);
        for (auto& p : prior) {
            p.mean = 0.0;
            p.variance = 1.0;
        }
        states.push_back(init_state(3, 1.0, prior));
    }

    for (int t = 1; t <= 300; ++t) {
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

    const PoEField agg = poe_aggregate_field(means, vars);
    for (std::size_t i = 0; i < n; ++i) {
        const GlobalPrediction gp = read_global(states[i]);
        for (int kdx = 0; kdx < 3; ++kdx) {
            CHECK(std::abs(gp.var_hat[kdx] - agg.variance[kdx]) < 1e-6);
            CHECK(std::abs(gp.mu_hat[kdx] - agg.mean[kdx]) < 1e-6);
            // Signals bounded below by the prior precision keep the
            // network variance inside (0, sigma_f^2].
            CHECK(gp.var_hat[kdx] > 0.0);
            CHECK(gp.var_hat[kdx] <= 1.0 + 1e-12);
        }
    }
}
