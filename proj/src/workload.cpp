#include "sabft/workload.hpp"

#include <string>

#include "sabft/rng.hpp"

namespace sabft {

std::string_view to_string(InputDistribution d) noexcept {
  return d == InputDistribution::uniform ? "uniform" : "outlier";
}

InputDistribution parse_input_distribution(std::string_view label) {
  if (label == "uniform") return InputDistribution::uniform;
  if (label == "outlier") return InputDistribution::outlier;
  throw InvalidInput("unknown input distribution '" + std::string(label) + "'");
}

namespace {

std::int8_t draw(SplitMix64& rng, InputDistribution d) {
  if (d == InputDistribution::uniform) return static_cast<std::int8_t>(static_cast<int>(rng.below(256)) - 128);
  if (rng.below(64) == 0) {
    const int mag = 64 + static_cast<int>(rng.below(64));
    return static_cast<std::int8_t>(rng.below(2) ? mag : -mag);
  }
  return static_cast<std::int8_t>(static_cast<int>(rng.below(17)) - 8);
}

}  // namespace

std::pair<QuantMatrix, QuantMatrix> generate_operands(const Workload& wl, std::uint64_t seed) {
  SplitMix64 rng(seed);
  QuantMatrix w(wl.m, wl.k), x(wl.k, wl.n);
  for (auto& v : w.data()) v = draw(rng, wl.distribution);
  for (auto& v : x.data()) v = draw(rng, wl.distribution);
  return {std::move(w), std::move(x)};
}

}  // namespace sabft
