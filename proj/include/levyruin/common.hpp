#pragma once

#include <limits>

namespace levyruin {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace levyruin
