#pragma once

#include <limits>

namespace rinp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace rinp
