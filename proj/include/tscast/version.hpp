#pragma once

namespace tscast {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace tscast
