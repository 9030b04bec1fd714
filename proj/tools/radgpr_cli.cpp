#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "radgpr/config.hpp"
#include "radgpr/csv.hpp"
#include "radgpr/version.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_validate(const fs::path& config_path) {
    const radgpr::SimConfig cfg = radgpr::load_config(config_path);
    const radgpr::GraphSchedule schedule(cfg.schedule_matrices);
    const radgpr::ValidationReport rep = radgpr::validate(schedule);

    bool balanced = true, nondegenerate = true;
    for (const auto& v : rep.violations) {
        if (v.find("balanced") != std::string::npos) balanced = false;
        if (v.find("non-degeneracy") != std::string::npos) nondegenerate = false;
    }

    std::cout << "agents: " << schedule.agent_count() << "\n";
    std::cout << "period: " << schedule.period() << "\n";
    std::cout << "alpha: " << radgpr::format_double(rep.alpha) << "\n";
    std::cout << "b: " << rep.b << "\n";
    std::cout << "zeta: " << radgpr::format_double(rep.zeta) << "\n";
    std::cout << "constant_transition_product: "
              << (rep.constant_transition_product ? "yes" : "no") << "\n";
    std::cout << "strong_connectivity: " << (rep.b > 0 ? "pass" : "FAIL") << "\n";
    std::cout << "balanced_communication: " << (balanced ? "pass" : "FAIL") << "\n";
    std::cout << "non_degeneracy: " << (nondegenerate ? "pass" : "FAIL") << "\n";

    bool kernel_ok = true;
    try {
        const radgpr::NoiseProfile noise(cfg.noise_variances);
        if (noise.size() != cfg.n_agents || schedule.agent_count() != cfg.n_agents) {
            std::cout << "agent_count_consistency: FAIL\n";
            kernel_ok = false;
        } else {
            std::cout << "agent_count_consistency: pass\n";
        }
        const radgpr::Kernel kernel(cfg.sigma_f_sq, cfg.lengthscale_sq);
        std::cout << "kernel: sigma_f_sq=" << radgpr::format_double(kernel.sigma_f_sq())
                  << " lengthscale_sq=" << radgpr::format_double(kernel.lengthscale_sq())
                  << "\n";
    } catch (const std::exception& e) {
        std::cout << "kernel: FAIL (" << e.what() << ")\n";
        kernel_ok = false;
    }

    if (!rep.ok) {
        for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
    }
    const bool ok = rep.ok && kernel_ok;
    std::cout << (ok ? "result: pass" : "result: FAIL") << "\n";
    return ok ? kExitOk : kExitValidationFailure;
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir,
            std::optional<std::uint64_t> seed_override, std::optional<int> threads_override) {
    radgpr::SimConfig cfg = radgpr::load_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    if (threads_override) cfg.threads = *threads_override;

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    {
        std::ofstream probe(out_dir / ".radgpr_probe");
        if (!probe) {
            std::cerr << "error: output directory not writable: " << out_dir << "\n";
            return kExitValidationFailure;
        }
    }
    fs::remove(out_dir / ".radgpr_probe", ec);

    const auto t0 = std::chrono::steady_clock::now();
    const radgpr::SimResult result = radgpr::run(cfg);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();

    const fs::path metrics_path = out_dir / "metrics.csv";
    const fs::path final_path = out_dir / "final_predictions.csv";
    const fs::path manifest_path = out_dir / "manifest.json";

    {
        std::ofstream os(metrics_path, std::ios::binary);
        radgpr::write_metrics_csv(os, result.metrics);
    }
    {
        std::ofstream os(final_path, std::ios::binary);
        radgpr::write_final_predictions_csv(os, result);
    }
    {
        nlohmann::json manifest;
        manifest["config_digest"] = radgpr::config_digest(read_file(config_path));
        manifest["seed"] = cfg.seed;
        manifest["version"] = radgpr::kVersion;
        manifest["sigma_f_sq_used"] = result.sigma_f_sq_used;
        manifest["outputs"] = {metrics_path.string(), final_path.string()};
        manifest["duration_seconds"] = seconds;
        std::ofstream os(manifest_path, std::ios::binary);
        os << manifest.dump(2) << "\n";
    }

    std::cout << "rounds: " << cfg.rounds << "\n";
    std::cout << "metrics: " << metrics_path.string() << " (" << result.metrics.size()
              << " rows)\n";
    std::cout << "final_predictions: " << final_path.string() << "\n";
    std::cout << "manifest: " << manifest_path.string() << "\n";
    std::cout << "duration_seconds: " << radgpr::format_double(seconds) << "\n";
    return kExitOk;
}

int cmd_sigma_f(const fs::path& config_path) {
    const radgpr::SimConfig cfg = radgpr::load_config(config_path);
    const radgpr::GraphSchedule schedule(cfg.schedule_matrices);
    const radgpr::ValidationReport rep = radgpr::validate(schedule);
    if (!rep.ok) {
        for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
        std::cout << "result: FAIL\n";
        return kExitValidationFailure;
    }
    const radgpr::NoiseProfile noise(cfg.noise_variances);
    const double start = std::max(1.0, cfg.sigma_f_sq);
    const radgpr::DistributedSigmaFResult sel =
        radgpr::select_sigma_f_distributed(schedule, noise, start, rep.b);

    std::cout << "start: " << radgpr::format_double(start) << "\n";
    for (std::size_t i = 0; i < sel.per_agent.size(); ++i) {
        std::cout << "agent_" << i
                  << "_sigma_f_sq: " << radgpr::format_double(sel.per_agent[i]) << "\n";
    }
    std::cout << "selected_sigma_f_sq: " << radgpr::format_double(sel.agreed) << "\n";
    std::cout << "condition_lhs: " << radgpr::format_double(sel.recheck.lhs) << "\n";
    std::cout << "condition_rhs: " << radgpr::format_double(sel.recheck.rhs) << "\n";
    std::cout << "condition_satisfied: " << (sel.recheck.satisfied ? "yes" : "no") << "\n";
    return sel.recheck.satisfied ? kExitOk : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resource-aware distributed Gaussian process regression harness"};
    app.set_version_flag("--version", radgpr::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    std::optional<int> threads_override;

    CLI::App* validate = app.add_subcommand("validate", "Check a config and its graph schedule");
    validate->add_option("--config", config_path, "Config file (JSON)")->required();

    CLI::App* run = app.add_subcommand("run", "Run the simulation and write CSV outputs");
    run->add_option("--config", config_path, "Config file (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory");
    std::uint64_t seed_value = 0;
    CLI::Option* seed_opt = run->add_option("--seed", seed_value, "Override the config seed");
    int threads_value = 0;
    CLI::Option* threads_opt =
        run->add_option("--threads", threads_value, "Worker threads for per-agent stages");

    CLI::App* sigma = app.add_subcommand(
        "sigma-f", "Distributed prior-variance selection with certification");
    sigma->add_option("--config", config_path, "Config file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        if (run->parsed()) {
            if (*seed_opt) seed_override = seed_value;
            if (*threads_opt) threads_override = threads_value;
            return cmd_run(config_path, out_dir, seed_override, threads_override);
        }
        if (sigma->parsed()) return cmd_sigma_f(config_path);
    } catch (const std::exception& e) {
        const std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        // Malformed input is a usage error; everything else is a failed check.
        if (what.find("parse failure") != std::string::npos ||
            what.find("cannot open") != std::string::npos ||
            what.find("invalid or missing key") != std::string::npos) {
            return kExitUsage;
        }
        return kExitValidationFailure;
    }
    return kExitUsage;
}
