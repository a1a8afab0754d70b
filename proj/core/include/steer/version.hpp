#pragma once

namespace steer {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace steer
