#pragma once

namespace topeig {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace topeig
