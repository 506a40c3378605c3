#pragma once

namespace sweeping {

inline constexpr const char* kToolName = "sweepsim";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace sweeping
