#pragma once

namespace stochlr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stochlr
