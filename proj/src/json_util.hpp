#pragma once

#include <cmath>
#include "json.hpp"

namespace fbq::detail {

inline nlohmann::json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace fbq::detail
