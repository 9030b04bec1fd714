#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "radgpr/kernel.hpp"
#include "radgpr/netgraph.hpp"
#include "radgpr/rng.hpp"

using namespace radgpr;
using helpers::alternating_schedule;
using helpers::complete_schedule;

TEST_CASE("squared-exponential evaluation") {
    const Kernel k(1.0, 0.5);  // exp(-2 r^2)

    const Point a{1.5, -2.0};
    CHECK(k(a, a) == 1.0);  // kappa(0) = sigma_f^2 exactly

    const Point z{0.0, 0.0}, z2{1.0, 0.0};
    CHECK(k(z, z2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(k.at_distance(1.0) == doctest::Approx(0.1353352832366127).epsilon(1e-12));

    const Kernel k4(4.0, 0.5);
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const Point u{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const Point v{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const double val = k4(u, v);
        CHECK(val > 0.0);
        CHECK(val <= 4.0);
    }

    const Point bad{1.0};
    CHECK_THROWS_AS(k(a, bad), std::invalid_argument);
}

TEST_CASE("kernel monotone in distance") {
    const Kernel k(2.0, 1.3);
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        const Point a{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        const Point b{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        const Point c{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        if (distance(a, b) <= distance(a, c)) {
            CHECK(k(a, b) >= k(a, c));
        } else {
            CHECK(k(a, b) <= k(a, c));
        }
    }
}

TEST_CASE("fusion constants, homogeneous pair") {
    const NoiseProfile noise({1.0, 1.0});
    const FusionConstants fc = compute_fusion_constants(1.0, noise);
    CHECK(fc.psi[0] == 0.5);
    CHECK(fc.psi[1] == 0.5);
    CHECK(fc.chi[0] == 2.0);
    CHECK(fc.chi[1] == 2.0);
    CHECK(fc.mu_chi == 2.0);
    CHECK(fc.c == 0.5);
    // c*sigma_f^2 - psi = 0 exactly, so no agent clears the margin.
    CHECK(fc.v_plus.empty());
    CHECK_THROWS_AS(fc.require_eps_plus(), std::runtime_error);
}

TEST_CASE("fusion constants, heterogeneous pair") {
    const NoiseProfile noise({0.5, 2.0});
    const FusionConstants fc = compute_fusion_constants(1.0, noise);
    CHECK(fc.chi[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(fc.chi[1] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(fc.mu_chi == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(fc.psi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(fc.psi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(fc.c == doctest::Approx(5.0 / 9.0).epsilon(1e-14));

    const auto plain = oracles::plain_fusion_constants(1.0, {0.5, 2.0});
    CHECK(oracles::rel_diff(fc.c, plain.c) < 1e-14);
    CHECK(oracles::rel_diff(fc.mu_chi, plain.mu_chi) < 1e-15);
    CHECK(oracles::rel_diff(fc.sigma_chi_sq, plain.sigma_chi_sq) < 1e-15);
}

TEST_CASE("fusion constants, four equal noises give c == psi exactly") {
    const NoiseProfile noise({0.01, 0.01, 0.01, 0.01});
    for (double s : {1.0, 2.0, 17.0}) {
        const FusionConstants fc = compute_fusion_constants(s, noise);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(fc.c == fc.psi[i]);
            CHECK(fc.psi[i] == s / (s + 0.01));
            CHECK(fc.gate(i) == 0.0);
        }
    }
}

TEST_CASE("fusion constants cross-checked against plain formula on random profiles") {
    Rng rng(321);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + (rng.next_u64() % 6);
        std::vector<double> vars(n);
        for (auto& v : vars) v = std::exp(rng.uniform(-5.0, 1.0));
        const double s = 1.0 + rng.uniform(0.0, 9.0);
        const FusionConstants fc = compute_fusion_constants(s, NoiseProfile(vars));
        const auto plain = oracles::plain_fusion_constants(s, vars);
        CHECK(oracles::rel_diff(fc.c, plain.c) < 1e-12);
        CHECK(oracles::rel_diff(fc.mu_chi, plain.mu_chi) < 1e-13);
        CHECK(oracles::rel_diff(fc.sigma_chi_sq, plain.sigma_chi_sq) < 1e-13);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(fc.psi[i] > 0.0);
            CHECK(fc.psi[i] < 1.0);
        }
    }
}

TEST_CASE("sigma_f selection satisfies the condition on recheck") {
    SUBCASE("rejects start below 1") {
        CHECK_THROWS_AS(select_sigma_f(NoiseProfile({0.1}), 0.5), std::invalid_argument);
    }

    SUBCASE("single agent, sweep oracle agreement") {
        const NoiseProfile noise({0.2});
        const double sel = select_sigma_f(noise, 1.0);
        CHECK(check_variance_condition(sel, noise).satisfied);
        // The sweep's first satisfying grid value cannot sit below the
        // bisection result by more than one grid step.
        const double swept = oracles::sweep_sigma_f(noise, 1.0, 64.0, 1e-3);
        CHECK(sel <= swept + 1e-3);
        CHECK(sel >= 1.0);
    }

    SUBCASE("reference noise profile") {
        const NoiseProfile noise({0.01, 0.01, 0.01, 0.01});
        const double sel = select_sigma_f(noise, 1.0);
        const auto rep = check_variance_condition(sel, noise);
        CHECK(rep.satisfied);
        CHECK(rep.lhs <= rep.rhs);
        CHECK(sel >= 1.0);
    }

    SUBCASE("already satisfying start returns the start") {
        const NoiseProfile noise({0.01, 0.01});
        const double big = select_sigma_f(noise, 1.0) * 4.0;
        CHECK(select_sigma_f(noise, big) == big);
    }
}

TEST_CASE("flooding on a complete graph finishes in one round") {
    const GraphSchedule g = complete_schedule(4);
    const std::vector<double> vals{0.1, 0.2, 0.3, 0.4};
    const FloodResult fr = flood_exchange(g, vals, 1);
    CHECK(fr.complete);
    CHECK(fr.rounds_used == 1);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) CHECK(fr.values[i][j] == vals[j]);
    }
}

TEST_CASE("flooding on the alternating schedule completes within n rounds") {
    const GraphSchedule g = alternating_schedule();
    const std::vector<double> vals{1.0, 2.0, 3.0, 4.0};
    const ValidationReport rep = validate(g);
    const FloodResult fr = flood_exchange(g, vals, rep.b);
    CHECK(fr.complete);
    CHECK(fr.rounds_used <= 4);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) CHECK(fr.values[i][j] == vals[j]);
    }
}

TEST_CASE("flooding reports unreachable agents on a disconnected graph") {
    SquareMatrix m(4);
    m.at(0, 0) = m.at(1, 1) = 1.0;
    m.at(2, 2) = m.at(3, 3) = 0.5;
    m.at(2, 3) = m.at(3, 2) = 0.5;
    const GraphSchedule g({m});
    const FloodResult fr = flood_exchange(g, std::vector<double>{1, 2, 3, 4}, 1);
    CHECK_FALSE(fr.complete);
    CHECK(fr.missing[0] == std::vector<std::size_t>{1, 2, 3});
    CHECK(fr.missing[2] == std::vector<std::size_t>{0, 1});
}

TEST_CASE("noise exchange returns a full profile per agent or names the gap") {
    const GraphSchedule g = alternating_schedule();
    const NoiseProfile noise({0.1, 0.2, 0.3, 0.4});
    const auto views = exchange_noise_variances(g, noise, validate(g).b);
    REQUIRE(views.size() == 4);
    for (const NoiseProfile& v : views) CHECK(v.variances() == noise.variances());

    const GraphSchedule idg({SquareMatrix::identity(4)});
    CHECK_THROWS_WITH_AS(exchange_noise_variances(idg, noise, 1),
                         "noise exchange incomplete; agent 0 missing {1,2,3} agent 1 missing "
                         "{0,2,3} agent 2 missing {0,1,3} agent 3 missing {0,1,2}",
                         std::runtime_error);
}

TEST_CASE("max consensus reaches the global max") {
    const std::vector<double> vals{0.7, -1.0, 3.5, 2.0};
    for (const GraphSchedule& g : {complete_schedule(4), alternating_schedule()}) {
        const auto out = max_consensus(g, vals, validate(g).b);
        for (double v : out) CHECK(v == 3.5);
    }
}

TEST_CASE("distributed selection agrees with the centralized one") {
    const GraphSchedule g = alternating_schedule();
    const NoiseProfile noise({0.02, 0.05, 0.01, 0.3});
    const int b = validate(g).b;
    const DistributedSigmaFResult sel = select_sigma_f_distributed(g, noise, 1.0, b);
    CHECK(sel.recheck.satisfied);
    const double central = select_sigma_f(noise, 1.0);
    for (double v : sel.per_agent) CHECK(v == central);
    CHECK(sel.agreed == central);
}
