#include "radgpr/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace radgpr {

LatentFn make_latent(const std::string& name) {
    if (name == "sin_cos") {
        return [](std::span<const double> z) {
            if (z.size() < 2) {
                throw std::invalid_argument("latent sin_cos needs dimension >= 2");
            }
            return std::sin(z[0]) + std::cos(z[1]);
        };
    }
    if (name == "zero") {
        return [](std::span<const double>) { return 0.0; };
    }
    if (name == "linear_x") {
        return [](std::span<const double> z) { return z.empty() ? 0.0 : z[0]; };
    }
    throw std::invalid_argument("unknown latent function: " + name);
}

Point step_trajectory(const Point& pos, Rng& rng, const MotionModel& motion, const Box& domain) {
    Point next = pos;
    for (double& x : next) x += motion.step_stddev * rng.normal();
    if (motion.boundary == BoundaryRule::Clamp) {
        domain.clamp(next);
    } else {
        domain.reflect(next);
    }
    return next;
}

double observe(const LatentFn& eta, std::span<const double> pos, double noise_var, Rng& rng) {
    return eta(pos) + std::sqrt(noise_var) * rng.normal();
}

LipschitzEstimate estimate_lipschitz(const LatentFn& eta, const Grid& probe) {
    if (probe.size() < 2) {
        throw std::invalid_argument("estimate_lipschitz: degenerate grid");
    }
    const std::size_t dim = probe.dim();
    const int per_axis = probe.points_per_axis();

    // Forward offsets in {−1,0,1}^dim whose first nonzero entry is +1,
    // so every axis and diagonal pair is visited once.
    std::vector<std::vector<int>> offsets;
    std::vector<int> off(dim, -1);
    while (true) {
        bool nonzero = false, forward = false;
        for (int v : off) {
            if (v != 0) {
                nonzero = true;
                forward = v > 0;
                break;
            }
        }
        if (nonzero && forward) offsets.push_back(off);
        std::size_t k = 0;
        for (; k < dim; ++k) {
            if (off[k] < 1) {
                ++off[k];
                break;
            }
            off[k] = -1;
        }
        if (k == dim) break;
    }

    double best = 0.0;
    std::vector<int> idx(dim, 0);
    for (std::size_t flat = 0; flat < probe.size(); ++flat) {
        std::size_t rem = flat;
        for (std::size_t k = dim; k-- > 0;) {
            idx[k] = static_cast<int>(rem % per_axis);
            rem /= per_axis;
        }
        const Point& a = probe.points()[flat];
        for (const auto& o : offsets) {
            bool in_range = true;
            std::size_t nb_flat = 0;
            for (std::size_t k = 0; k < dim; ++k) {
                const int j = idx[k] + o[k];
                if (j < 0 || j >= per_axis) {
                    in_range = false;
                    break;
                }
                nb_flat = nb_flat * per_axis + static_cast<std::size_t>(j);
            }
            if (!in_range) continue;
            const Point& b = probe.points()[nb_flat];
            const double d = distance(a, b);
            if (d > 0.0) best = std::max(best, std::abs(eta(a) - eta(b)) / d);
        }
    }
    return LipschitzEstimate{best};
}

namespace {

struct PooledSample {
    Point z;
    double y = 0.0;
    double noise_var = 0.0;
};

// Nearest pooled sample, ties to the earliest insertion.
std::size_t pooled_nearest(const std::vector<PooledSample>& pool, std::span<const double> z) {
    std::size_t best = 0;
    double best_d2 = squared_distance(pool[0].z, z);
    for (std::size_t i = 1; i < pool.size(); ++i) {
        const double d2 = squared_distance(pool[i].z, z);
        if (d2 < best_d2) {
            best = i;
            best_d2 = d2;
        }
    }
    return best;
}

void for_each_agent(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

double relative_residual(const std::vector<double>& state_sum,
                         const std::vector<double>& signal_sum) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < state_sum.size(); ++k) {
        num = std::max(num, std::abs(state_sum[k] - signal_sum[k]));
        den = std::max(den, std::abs(signal_sum[k]));
    }
    return den > 0.0 ? num / den : num;
}

}  // namespace

SimResult run(const SimConfig& cfg, const RoundObserver& observer) {
    if (cfg.n_agents == 0) throw std::invalid_argument("run: n_agents must be positive");
    if (cfg.rounds < 1) throw std::invalid_argument("run: rounds must be >= 1");
    if (cfg.domain.dim() == 0) throw std::invalid_argument("run: empty domain");
    for (std::size_t k = 0; k < cfg.domain.dim(); ++k) {
        if (!(cfg.domain.lo[k] < cfg.domain.hi[k])) {
            throw std::invalid_argument("run: domain box is degenerate");
        }
    }
    if (cfg.freeze_data_at.has_value() && *cfg.freeze_data_at < 1) {
        throw std::invalid_argument("run: freeze_data_at must be >= 1");
    }
    const NoiseProfile noise(cfg.noise_variances);
    if (noise.size() != cfg.n_agents) {
        throw std::invalid_argument("run: noise variance count != n_agents");
    }

    const GraphSchedule schedule(cfg.schedule_matrices);
    if (schedule.agent_count() != cfg.n_agents) {
        throw std::invalid_argument("run: schedule size != n_agents");
    }
    const ValidationReport report = validate(schedule);
    if (!report.ok) {
        std::ostringstream msg;
        msg << "run: schedule fails validation:";
        for (const auto& v : report.violations) msg << " [" << v << "]";
        throw std::invalid_argument(msg.str());
    }

    double sigma_f_sq = cfg.sigma_f_sq;
    if (cfg.sigma_f_mode == SigmaFMode::Selected) {
        sigma_f_sq =
            select_sigma_f_distributed(schedule, noise, std::max(1.0, cfg.sigma_f_sq), report.b)
                .agreed;
    }
    const Kernel kernel(sigma_f_sq, cfg.lengthscale_sq);
    const FusionConstants consts = compute_fusion_constants(sigma_f_sq, noise);

    const LatentFn eta = make_latent(cfg.latent);
    Grid test_grid(cfg.domain, cfg.test_points_per_axis);
    const std::vector<Point>& z_star = test_grid.points();
    const std::vector<std::size_t> agg_indices = test_grid.strided_subset(cfg.agg_stride);
    std::vector<Point> z_agg;
    z_agg.reserve(agg_indices.size());
    for (std::size_t idx : agg_indices) z_agg.push_back(z_star[idx]);

    std::vector<double> eta_on_star(z_star.size());
    for (std::size_t p = 0; p < z_star.size(); ++p) eta_on_star[p] = eta(z_star[p]);

    const std::size_t n = cfg.n_agents;
    std::vector<Rng> traj_rng, obs_rng;
    traj_rng.reserve(n);
    obs_rng.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        traj_rng.emplace_back(derive_seed(cfg.seed, 2 * i));
        obs_rng.emplace_back(derive_seed(cfg.seed, 2 * i + 1));
    }

    std::vector<Point> positions(n, Point(cfg.domain.dim(), 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < cfg.domain.dim(); ++k) {
            positions[i][k] = traj_rng[i].uniform(cfg.domain.lo[k], cfg.domain.hi[k]);
        }
    }

    std::vector<AgentDataset> datasets;
    datasets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        datasets.emplace_back(static_cast<int>(i), noise.variance(i));
    }
    std::vector<PooledSample> pool;

    // Consensus states seeded from the prior-only prediction.
    std::vector<LocalPrediction> prior_on_agg;
    prior_on_agg.reserve(z_agg.size());
    for (const Point& p : z_agg) prior_on_agg.push_back(prior_prediction(kernel, p));
    std::vector<ConsensusState> states(n, init_state(z_agg.size(), sigma_f_sq, prior_on_agg));

    std::vector<AgentRoundData> agents(n);
    std::vector<ReferenceSignals> signals(n);
    std::vector<std::vector<double>> local_mean_on_agg(n), local_var_on_agg(n);
    std::vector<double> dispersions(n, 0.0);
    std::vector<double> central_mean(z_star.size(), 0.0), central_var(z_star.size(), 0.0);
    std::vector<char> local_dirty(n, 1);
    bool central_dirty = true;

    SimResult result;
    result.schedule_report = report;
    result.sigma_f_sq_used = sigma_f_sq;
    result.metrics.reserve(static_cast<std::size_t>(cfg.rounds) * n);

    for (int t = 1; t <= cfg.rounds; ++t) {
        const bool sampling = !cfg.freeze_data_at.has_value() || t <= *cfg.freeze_data_at;
        if (sampling) {
            for (std::size_t i = 0; i < n; ++i) {
                positions[i] = step_trajectory(positions[i], traj_rng[i], cfg.motion, cfg.domain);
                const double y = observe(eta, positions[i], noise.variance(i), obs_rng[i]);
                // Clamping can pin two steps to the same boundary point;
                // the repeated observation is dropped, not re-recorded.
                if (datasets[i].contains(positions[i])) continue;
                datasets[i].append(positions[i], y);
                pool.push_back(PooledSample{positions[i], y, noise.variance(i)});
                local_dirty[i] = 1;
                central_dirty = true;
            }
        }

        for_each_agent(n, cfg.threads, [&](std::size_t i) {
            if (!local_dirty[i]) return;
            AgentRoundData& a = agents[i];
            a.local_mean.resize(z_star.size());
            a.local_var.resize(z_star.size());
            a.local_nearest_dist.resize(z_star.size());
            double disp = 0.0;
            for (std::size_t p = 0; p < z_star.size(); ++p) {
                const LocalPrediction lp = predict(datasets[i], kernel, z_star[p]);
                a.local_mean[p] = lp.mean;
                a.local_var[p] = lp.variance;
                a.local_nearest_dist[p] = lp.nearest_distance;
                disp = std::max(disp, lp.nearest_distance);
            }
            dispersions[i] = disp;
            local_mean_on_agg[i].resize(z_agg.size());
            local_var_on_agg[i].resize(z_agg.size());
            for (std::size_t k = 0; k < agg_indices.size(); ++k) {
                local_mean_on_agg[i][k] = a.local_mean[agg_indices[k]];
                local_var_on_agg[i][k] = a.local_var[agg_indices[k]];
            }
            local_dirty[i] = 0;
        });

        for (std::size_t i = 0; i < n; ++i) {
            signals[i] = signals_from_values(local_mean_on_agg[i], local_var_on_agg[i]);
        }

        // Mix with the matrix the round-(t−1) messages were sent on.
        const SquareMatrix& a_prev = schedule.at_time(t - 1);
        std::vector<ConsensusState> next_states(n);
        for (std::size_t i = 0; i < n; ++i) {
            RoundInput input;
            input.new_r = signals[i];
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && a_prev.at(i, j) != 0.0) {
                    input.neighbors.push_back(NeighborContribution{a_prev.at(i, j), &states[j]});
                }
            }
            next_states[i] = fodac_step(states[i], input, a_prev.at(i, i));
        }
        states.swap(next_states);

        for_each_agent(n, cfg.threads, [&](std::size_t i) {
            AgentRoundData& a = agents[i];
            a.global = read_global(states[i]);
            a.fused = fuse_all(z_star, a.local_mean, a.local_var, z_agg,
                               LocalOnAgg{local_mean_on_agg[i], local_var_on_agg[i]}, a.global,
                               kernel, consts, i);
        });

        if (central_dirty) {
            for (std::size_t p = 0; p < z_star.size(); ++p) {
                const std::size_t b = pooled_nearest(pool, z_star[p]);
                const LocalPrediction cp = predict_from_sample(kernel, z_star[p], pool[b].z,
                                                               pool[b].y, pool[b].noise_var);
                central_mean[p] = cp.mean;
                central_var[p] = cp.variance;
            }
            central_dirty = false;
        }

        // Conservation residual: Σ_i state(t) vs Σ_i r(t), ∞-norm relative.
        double residual = 0.0;
        {
            const auto sum_theta = sum_across_agents(std::span<const ConsensusState>(states),
                                                     &ConsensusState::theta);
            const auto sum_xi =
                sum_across_agents(std::span<const ConsensusState>(states), &ConsensusState::xi);
            const auto sum_lambda = sum_across_agents(std::span<const ConsensusState>(states),
                                                      &ConsensusState::lambda);
            const auto sum_r_theta = sum_across_agents(
                std::span<const ReferenceSignals>(signals), &ReferenceSignals::r_theta);
            const auto sum_r_xi = sum_across_agents(std::span<const ReferenceSignals>(signals),
                                                    &ReferenceSignals::r_xi);
            const auto sum_r_lambda = sum_across_agents(
                std::span<const ReferenceSignals>(signals), &ReferenceSignals::r_lambda);
            residual = std::max({relative_residual(sum_theta, sum_r_theta),
                                 relative_residual(sum_xi, sum_r_xi),
                                 relative_residual(sum_lambda, sum_r_lambda)});
        }

        double err_central = 0.0;
        for (std::size_t p = 0; p < z_star.size(); ++p) {
            err_central += std::abs(central_mean[p] - eta_on_star[p]);
        }
        err_central /= static_cast<double>(z_star.size());

        for (std::size_t i = 0; i < n; ++i) {
            const AgentRoundData& a = agents[i];
            MetricsRow row;
            row.t = t;
            row.agent = static_cast<int>(i);
            double el = 0.0, ef = 0.0, vl = 0.0, vf = 0.0;
            for (std::size_t p = 0; p < z_star.size(); ++p) {
                el += std::abs(a.local_mean[p] - eta_on_star[p]);
                ef += std::abs(a.fused.mu_tilde[p] - eta_on_star[p]);
                vl += a.local_var[p];
                vf += a.fused.var_tilde[p];
            }
            const double m = static_cast<double>(z_star.size());
            row.err_local = el / m;
            row.err_fused = ef / m;
            row.err_central = err_central;
            row.var_local_avg = vl / m;
            row.var_fused_avg = vf / m;
            row.dispersion = dispersions[i];
            row.consensus_residual = residual;
            result.metrics.push_back(row);
        }

        if (observer) {
            RoundObservation obs;
            obs.t = t;
            obs.datasets = &datasets;
            obs.states = &states;
            obs.signals = &signals;
            obs.agents = &agents;
            obs.z_star = &z_star;
            obs.agg_indices = &agg_indices;
            obs.central_mean = &central_mean;
            obs.central_var = &central_var;
            obs.eta_on_star = &eta_on_star;
            observer(obs);
        }
    }

    result.test_grid = std::move(test_grid);
    result.agg_indices = agg_indices;
    result.eta_on_star = std::move(eta_on_star);
    result.final_agents = std::move(agents);
    result.final_central_mean = std::move(central_mean);
    result.final_central_var = std::move(central_var);
    return result;
}

MeanBoundCheck mean_bound_violation_rate(const std::vector<std::vector<Point>>& agent_inputs,
                                         const Kernel& k, const NoiseProfile& noise,
                                         const LatentFn& eta, const Grid& probe, double epsilon,
                                         int realizations, std::uint64_t seed) {
    if (!(epsilon > std::sqrt(noise.max_variance()))) {
        throw std::invalid_argument(
            "mean_bound_violation_rate: epsilon must exceed the largest noise stddev");
    }
    if (agent_inputs.size() != noise.size()) {
        throw std::invalid_argument("mean_bound_violation_rate: geometry/noise size mismatch");
    }
    const std::size_t n = agent_inputs.size();
    const auto& grid_pts = probe.points();

    double eta_sup = 0.0;
    for (const Point& p : grid_pts) eta_sup = std::max(eta_sup, std::abs(eta(p)));
    const double ell = estimate_lipschitz(eta, probe).ell_eta;

    // Fixed geometry: nearest training index and dispersion per agent.
    std::vector<std::vector<std::size_t>> nearest_idx(n,
                                                      std::vector<std::size_t>(grid_pts.size()));
    std::vector<std::vector<double>> nearest_rho(n, std::vector<double>(grid_pts.size()));
    std::vector<double> disp(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& inputs = agent_inputs[i];
        if (inputs.empty()) {
            throw std::invalid_argument("mean_bound_violation_rate: empty agent dataset");
        }
        for (std::size_t p = 0; p < grid_pts.size(); ++p) {
            std::size_t best = 0;
            double best_d2 = squared_distance(inputs[0], grid_pts[p]);
            for (std::size_t s = 1; s < inputs.size(); ++s) {
                const double d2 = squared_distance(inputs[s], grid_pts[p]);
                if (d2 < best_d2) {
                    best = s;
                    best_d2 = d2;
                }
            }
            nearest_idx[i][p] = best;
            nearest_rho[i][p] = std::sqrt(best_d2);
            disp[i] = std::max(disp[i], nearest_rho[i][p]);
        }
    }

    MeanBoundCheck out;
    out.eta_sup = eta_sup;
    out.lipschitz = ell;
    out.chebyshev_bound = noise.max_variance() / (epsilon * epsilon);

    Rng rng(derive_seed(seed, 0xB0));
    std::vector<double> ys;
    for (int r = 0; r < realizations; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& inputs = agent_inputs[i];
            ys.resize(inputs.size());
            const double sd = std::sqrt(noise.variance(i));
            for (std::size_t s = 0; s < inputs.size(); ++s) {
                ys[s] = eta(inputs[s]) + sd * rng.normal();
            }
            const double denom = k.sigma_f_sq() + noise.variance(i);
            const double bound_tail =
                (1.0 - k.at_distance(disp[i]) / denom) * eta_sup + ell * disp[i] + epsilon;
            for (std::size_t p = 0; p < grid_pts.size(); ++p) {
                const double mu =
                    k.at_distance(nearest_rho[i][p]) / denom * ys[nearest_idx[i][p]];
                ++out.samples_checked;
                if (std::abs(mu - eta(grid_pts[p])) > bound_tail) ++out.violations;
            }
        }
    }
    out.violation_rate =
        static_cast<double>(out.violations) / static_cast<double>(out.samples_checked);
    return out;
}

}  // namespace radgpr
