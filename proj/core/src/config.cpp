#include "radgpr/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace radgpr {

namespace {

using nlohmann::json;

SquareMatrix matrix_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty()) {
        throw std::runtime_error("config: schedule matrix must be a non-empty array of rows");
    }
    const std::size_t n = rows.size();
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || row.size() != n) {
            throw std::runtime_error("config: schedule matrix must be square");
        }
        for (std::size_t j = 0; j < n; ++j) m.at(i, j) = row[j].get<double>();
    }
    return m;
}

json matrix_to_json(const SquareMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m.at(i, j));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

SimConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: parse failure: ") + e.what());
    }

    try {
        SimConfig cfg;
        const auto& agents = j.at("agents");
        cfg.n_agents = agents.at("count").get<std::size_t>();
        cfg.noise_variances = agents.at("noise_variances").get<std::vector<double>>();

        const auto& kernel = j.at("kernel");
        const std::string family = kernel.value("family", "squared_exponential");
        if (family != "squared_exponential") {
            throw std::runtime_error("config: unsupported kernel family: " + family);
        }
        cfg.sigma_f_sq = kernel.at("sigma_f_sq").get<double>();
        if (kernel.contains("lengthscale_sq")) {
            cfg.lengthscale_sq = kernel.at("lengthscale_sq").get<double>();
        } else {
            const double ell = kernel.at("lengthscale").get<double>();
            cfg.lengthscale_sq = ell * ell;
        }
        const std::string mode = kernel.value("mode", "fixed");
        if (mode == "fixed") {
            cfg.sigma_f_mode = SigmaFMode::Fixed;
        } else if (mode == "selected") {
            cfg.sigma_f_mode = SigmaFMode::Selected;
        } else {
            throw std::runtime_error("config: kernel.mode must be 'fixed' or 'selected'");
        }

        const auto& schedule = j.at("schedule");
        const auto& mats = schedule.at("matrices");
        for (const auto& m : mats) cfg.schedule_matrices.push_back(matrix_from_json(m));
        if (schedule.contains("period")) {
            const std::size_t period = schedule.at("period").get<std::size_t>();
            if (period != cfg.schedule_matrices.size()) {
                throw std::runtime_error("config: schedule.period != number of matrices");
            }
        }

        const auto& domain = j.at("domain");
        cfg.domain.lo = domain.at("min").get<std::vector<double>>();
        cfg.domain.hi = domain.at("max").get<std::vector<double>>();

        cfg.latent = j.value("latent", std::string("sin_cos"));
        cfg.rounds = j.at("rounds").get<int>();
        cfg.test_points_per_axis = j.at("test_grid").at("points_per_axis").get<int>();
        cfg.agg_stride = j.at("agg_grid").at("stride").get<int>();

        if (j.contains("motion")) {
            const auto& motion = j.at("motion");
            cfg.motion.step_stddev = motion.value("step_stddev", 1.0);
            const std::string boundary = motion.value("boundary", "clamp");
            if (boundary == "clamp") {
                cfg.motion.boundary = BoundaryRule::Clamp;
            } else if (boundary == "reflect") {
                cfg.motion.boundary = BoundaryRule::Reflect;
            } else {
                throw std::runtime_error("config: motion.boundary must be 'clamp' or 'reflect'");
            }
        }

        cfg.seed = j.value("seed", std::uint64_t{1});
        if (j.contains("freeze_data_at")) {
            cfg.freeze_data_at = j.at("freeze_data_at").get<int>();
        }
        cfg.threads = j.value("threads", 1);
        return cfg;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("config: invalid or missing key: ") + e.what());
    }
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("config: cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const SimConfig& cfg) {
    json j;
    j["agents"]["count"] = cfg.n_agents;
    j["agents"]["noise_variances"] = cfg.noise_variances;
    j["kernel"]["family"] = "squared_exponential";
    j["kernel"]["sigma_f_sq"] = cfg.sigma_f_sq;
    j["kernel"]["lengthscale_sq"] = cfg.lengthscale_sq;
    j["kernel"]["mode"] = cfg.sigma_f_mode == SigmaFMode::Fixed ? "fixed" : "selected";
    json mats = json::array();
    for (const auto& m : cfg.schedule_matrices) mats.push_back(matrix_to_json(m));
    j["schedule"]["matrices"] = mats;
    j["schedule"]["period"] = cfg.schedule_matrices.size();
    j["domain"]["min"] = cfg.domain.lo;
    j["domain"]["max"] = cfg.domain.hi;
    j["latent"] = cfg.latent;
    j["rounds"] = cfg.rounds;
    j["test_grid"]["points_per_axis"] = cfg.test_points_per_axis;
    j["agg_grid"]["stride"] = cfg.agg_stride;
    j["motion"]["step_stddev"] = cfg.motion.step_stddev;
    j["motion"]["boundary"] = cfg.motion.boundary == BoundaryRule::Clamp ? "clamp" : "reflect";
    j["seed"] = cfg.seed;
    if (cfg.freeze_data_at) j["freeze_data_at"] = *cfg.freeze_data_at;
    j["threads"] = cfg.threads;
    return j.dump(2);
}

std::string config_digest(const std::string& json_text) {
    // nlohmann::json orders object keys, so dump() is canonical.
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: parse failure: ") + e.what());
    }
    const std::string canonical = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
}

}  // namespace radgpr
