#pragma once

#include <string_view>

namespace rabispec {

inline constexpr std::string_view version = "0.1.0";

}  // namespace rabispec
