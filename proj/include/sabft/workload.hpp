#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include "sabft/matrix.hpp"

namespace sabft {

enum class InputDistribution {
  uniform,  // every value uniform over [-128, 127]
  outlier,  // mostly [-8, 8], with 1/64 of values drawn from +-[64, 127]
};

std::string_view to_string(InputDistribution d) noexcept;
InputDistribution parse_input_distribution(std::string_view label);

struct Workload {
  std::size_t m = 64;
  std::size_t k = 64;
  std::size_t n = 64;
  std::size_t gemm_count = 1000;
  InputDistribution distribution = InputDistribution::uniform;
  std::uint64_t seed = 1;

  std::uint64_t macs_per_gemm() const noexcept { return std::uint64_t{m} * k * n; }
};

// W (m x k) and X (k x n) drawn from the workload's distribution.
std::pair<QuantMatrix, QuantMatrix> generate_operands(const Workload& wl, std::uint64_t seed);

}  // namespace sabft
