#pragma once

#include "radgpr/netgraph.hpp"
#include "radgpr/simharness.hpp"

namespace helpers {

// Period-2 alternating schedule used by the reference experiment: a
// weighted 4-ring at even times, disjoint pair averaging at odd times.
inline radgpr::GraphSchedule alternating_schedule() {
    radgpr::SquareMatrix ring(4), pairs(4);
    const double r[4][4] = {{0.5, 0.25, 0, 0.25},
                            {0.25, 0.5, 0.25, 0},
                            {0, 0.25, 0.5, 0.25},
                            {0.25, 0, 0.25, 0.5}};
    const double p[4][4] = {
        {0.5, 0, 0.5, 0}, {0, 0.5, 0, 0.5}, {0.5, 0, 0.5, 0}, {0, 0.5, 0, 0.5}};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            ring.at(i, j) = r[i][j];
            pairs.at(i, j) = p[i][j];
        }
    }
    return radgpr::GraphSchedule({ring, pairs});
}

inline radgpr::GraphSchedule complete_schedule(std::size_t n) {
    radgpr::SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m.at(i, j) = 1.0 / static_cast<double>(n);
    }
    return radgpr::GraphSchedule({m});
}

// The reference experiment configuration, grid size adjustable.
inline radgpr::SimConfig reference_config(int rounds = 100, int points_per_axis = 40,
                                      std::uint64_t seed = 1) {
    radgpr::SimConfig cfg;
    cfg.n_agents = 4;
    cfg.rounds = rounds;
    cfg.domain = radgpr::Box{{0.0, 0.0}, {10.0, 10.0}};
    cfg.latent = "sin_cos";
    cfg.noise_variances = {0.01, 0.01, 0.01, 0.01};
    cfg.sigma_f_sq = 1.0;
    cfg.lengthscale_sq = 0.5;
    cfg.test_points_per_axis = points_per_axis;
    cfg.agg_stride = 2;
    cfg.schedule_matrices = alternating_schedule().matrices();
    cfg.motion.step_stddev = 1.0;
    cfg.seed = seed;
    return cfg;
}

}  // namespace helpers
