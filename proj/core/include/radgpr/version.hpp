#pragma once

namespace radgpr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace radgpr
