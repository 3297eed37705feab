#pragma once

namespace phaselab {

inline constexpr const char* kArtifactName = "phaselab";
inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace phaselab
