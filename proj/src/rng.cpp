#include "sabft/rng.hpp"

#include <cmath>
#include <numbers>

#include "sabft/int128.hpp"

namespace sabft {

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  uint128 m = static_cast<uint128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<uint128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double SplitMix64::gaussian() noexcept {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, std::uint64_t gemm) noexcept {
  constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t s = mix64(base + kGolden);
  s = mix64(s ^ (trial + 1) * kGolden);
  s = mix64(s ^ (gemm + 1) * 0xD1B54A32D192ED03ULL);
  return s;
}

}  // namespace sabft
