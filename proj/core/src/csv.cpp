#include "radgpr/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace radgpr {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf, res.ptr);
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
    os << "t,agent,err_local,err_fused,err_central,var_local_avg,var_fused_avg,dispersion,"
          "consensus_residual\n";
    for (const MetricsRow& r : rows) {
        os << r.t << ',' << r.agent << ',' << format_double(r.err_local) << ','
           << format_double(r.err_fused) << ',' << format_double(r.err_central) << ','
           << format_double(r.var_local_avg) << ',' << format_double(r.var_fused_avg) << ','
           << format_double(r.dispersion) << ',' << format_double(r.consensus_residual) << '\n';
    }
}

void write_final_predictions_csv(std::ostream& os, const SimResult& result) {
    const auto& pts = result.test_grid.points();
    const std::size_t n = result.final_agents.size();

    os << "z1,z2";
    os << ",eta";
    for (std::size_t i = 0; i < n; ++i) {
        os << ",local_mu_" << i << ",local_var_" << i << ",fused_mu_" << i << ",fused_var_" << i;
    }
    os << ",central_mu,central_var\n";

    for (std::size_t p = 0; p < pts.size(); ++p) {
        os << format_double(pts[p][0]) << ','
           << format_double(pts[p].size() > 1 ? pts[p][1] : 0.0);
        os << ',' << format_double(result.eta_on_star[p]);
        for (std::size_t i = 0; i < n; ++i) {
            const AgentRoundData& a = result.final_agents[i];
            os << ',' << format_double(a.local_mean[p]) << ',' << format_double(a.local_var[p])
               << ',' << format_double(a.fused.mu_tilde[p]) << ','
               << format_double(a.fused.var_tilde[p]);
        }
        os << ',' << format_double(result.final_central_mean[p]) << ','
           << format_double(result.final_central_var[p]) << '\n';
    }
}

}  // namespace radgpr
