#pragma once

#include <filesystem>
#include <string>

#include "radgpr/simharness.hpp"

namespace radgpr {

/// Parse a simulation config from its JSON text. Throws
/// std::runtime_error with a location message on malformed input.
SimConfig parse_config(const std::string& json_text);

SimConfig load_config(const std::filesystem::path& path);

std::string config_to_json(const SimConfig& cfg);

/// FNV-1a hash of the canonical (key-sorted) serialization, so the
/// digest is stable under key reordering in the file.
std::string config_digest(const std::string& json_text);

}  // namespace radgpr
