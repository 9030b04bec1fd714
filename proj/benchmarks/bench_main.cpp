#include <benchmark/benchmark.h>

#include "radgpr/simharness.hpp"

namespace {

using namespace radgpr;

AgentDataset make_dataset(std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    AgentDataset ds(0, 0.01);
    const LatentFn eta = make_latent("sin_cos");
    for (std::size_t s = 0; s < samples; ++s) {
        Point z{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};
        ds.append(z, observe(eta, z, 0.01, rng));
    }
    return ds;
}

void BM_LocalPredict(benchmark::State& state) {
    const Kernel k(1.0, 0.5);
    const AgentDataset ds = make_dataset(static_cast<std::size_t>(state.range(0)), 42);
    const Point z{5.0, 5.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict(ds, k, z));
    }
}
BENCHMARK(BM_LocalPredict)->Arg(100)->Arg(400)->Arg(1600);

void BM_FodacStep(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    Rng rng(7);
    std::vector<LocalPrediction> preds(m);
    for (auto& p : preds) {
        p.mean = rng.normal();
        p.variance = 0.5 + rng.uniform();
    }
    ConsensusState self = init_state(m, 1.0, preds);
    ConsensusState other = self;
    ReferenceSignals r;
    r.r_theta.assign(m, 0.3);
    r.r_xi.assign(m, 1.7);
    r.r_lambda.assign(m, 0.6);
    RoundInput input{{{0.5, &other}}, r};
    for (auto _ : state) {
        benchmark::DoNotOptimize(fodac_step(self, input, 0.5));
    }
}
BENCHMARK(BM_FodacStep)->Arg(100)->Arg(400);

void BM_SimRound(benchmark::State& state) {
    SimConfig cfg;
    cfg.n_agents = 4;
    cfg.rounds = static_cast<int>(state.range(0));
    cfg.domain = Box{{0.0, 0.0}, {10.0, 10.0}};
    cfg.noise_variances = {0.01, 0.01, 0.01, 0.01};
    cfg.test_points_per_axis = 20;
    cfg.agg_stride = 2;
    SquareMatrix ring(4), pairs(4);
    const double r[4][4] = {{0.5, 0.25, 0, 0.25},
                            {0.25, 0.5, 0.25, 0},
                            {0, 0.25, 0.5, 0.25},
                            {0.25, 0, 0.25, 0.5}};
    const double p[4][4] = {{0.5, 0, 0.5, 0}, {0, 0.5, 0, 0.5}, {0.5, 0, 0.5, 0},
                            {0, 0.5, 0, 0.5}};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            ring.at(i, j) = r[i][j];
            pairs.at(i, j) = p[i][j];
        }
    }
    cfg.schedule_matrices = {ring, pairs};
    cfg.seed = 3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(cfg));
    }
}
BENCHMARK(BM_SimRound)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
