#pragma once

namespace scenetext {

inline constexpr const char* kEngineVersion = "0.1.0";

} // namespace scenetext
