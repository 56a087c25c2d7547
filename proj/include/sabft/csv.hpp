#pragma once

#include <cstdint>
#include <string>

namespace sabft::csv {

// Reals use 6 significant digits ("%.6g"); infinities print as inf/-inf.
std::string real(double v);
std::string integer(std::int64_t v);
std::string integer(std::uint64_t v);

}  // namespace sabft::csv
