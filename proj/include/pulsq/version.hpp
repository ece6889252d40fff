#pragma once

namespace pulsq {

inline constexpr const char* kToolName = "pulsed-squeeze";
inline constexpr const char* kToolVersion = "1.0.0";

} // namespace pulsq
