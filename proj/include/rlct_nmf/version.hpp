#pragma once

#include <string_view>

namespace rlct_nmf {

inline constexpr std::string_view kVersion = "0.1.0";

} // namespace rlct_nmf
