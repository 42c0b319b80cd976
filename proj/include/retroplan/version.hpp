#pragma once

namespace retroplan {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace retroplan
