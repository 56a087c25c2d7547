#pragma once

#include <cstdint>
#include <limits>

namespace sabft {

// SplitMix64. Chosen over the <random> engines because its output, and
// everything derived from it here (uniform reals, bounded integers,
// Gaussians), is fully specified and reproduces bit-for-bit across
// platforms and standard libraries.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // true with probability p; p <= 0 never, p >= 1 always. Consumes one draw.
  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Uniform on [0, bound), bound > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) noexcept;

  // Standard normal via Box-Muller; consumes two draws per call.
  double gaussian() noexcept;

 private:
  std::uint64_t state_;
};

// SplitMix64 output finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Independent stream seed for (experiment seed, trial index, gemm index).
// Distinct index pairs give unrelated streams, so trials can be run in any
// order or in parallel.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, std::uint64_t gemm = 0) noexcept;

}  // namespace sabft
