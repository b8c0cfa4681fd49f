#pragma once

namespace floqeels {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace floqeels
