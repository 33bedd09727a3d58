#pragma once

namespace canclab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace canclab
