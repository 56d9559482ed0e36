#pragma once

namespace hdpa {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace hdpa
