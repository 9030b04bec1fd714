#pragma once

#include <ostream>
#include <string>

#include "radgpr/simharness.hpp"

namespace radgpr {

/// Shortest decimal representation that parses back to the same
/// double ('.' separator, locale-free).
std::string format_double(double v);

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows);

/// Final per-test-point table: z1, z2, eta, per-agent local and fused
/// mean/variance, then the pooled baseline.
void write_final_predictions_csv(std::ostream& os, const SimResult& result);

}  // namespace radgpr
