#pragma once

namespace osim {

inline constexpr const char* kToolName = "osim";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace osim
