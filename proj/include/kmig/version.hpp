#pragma once

#include <string_view>

namespace kmig {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace kmig
