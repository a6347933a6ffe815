#pragma once

namespace critheat {

inline constexpr const char* kToolName = "critheat";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace critheat
