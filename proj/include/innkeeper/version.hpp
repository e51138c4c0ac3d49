#pragma once

namespace innkeeper {

inline constexpr const char* kArtifactName = "innkeeper";
inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace innkeeper
