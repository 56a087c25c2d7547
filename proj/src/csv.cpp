#include "sabft/csv.hpp"

#include <cmath>
#include <cstdio>

namespace sabft::csv {

std::string real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string integer(std::int64_t v) { return std::to_string(v); }
std::string integer(std::uint64_t v) { return std::to_string(v); }

}  // namespace sabft::csv
