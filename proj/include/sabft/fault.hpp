#pragma once

#include <cstdint>
#include <vector>

#include "sabft/matrix.hpp"

namespace sabft {

enum class FaultMode {
  ber,      // independent per-bit flips at a bit error rate
  uniform,  // `freq` identical additive errors of size `mag`
};

struct BitWindow {
  int lo = 16;
  int hi = 31;

  bool valid() const noexcept { return 0 <= lo && lo <= hi && hi <= 31; }
  int width() const noexcept { return hi - lo + 1; }
};

struct FaultConfig {
  FaultMode mode = FaultMode::ber;
  double ber = 0.0;
  BitWindow bit_window{};
  std::int32_t mag = 0;
  std::uint64_t freq = 0;
  std::uint64_t seed = 0;
  // Uniform mode only: give each error a random sign instead of +mag.
  bool signed_mix = false;
  // Uniform mode only: place every error in a different output column.
  bool distinct_columns = false;

  // Throws InvalidInput when the mode-specific fields are out of range for
  // an output of the given shape.
  void validate(std::size_t rows, std::size_t cols) const;
};

struct ErrorEvent {
  std::size_t row = 0;
  std::size_t col = 0;
  std::int32_t before = 0;
  std::int32_t after = 0;
  // Bit-flip mask applied (ber mode); 0 for additive errors.
  std::uint32_t flip_mask = 0;

  // Signed error introduced at this element, exact in 64 bits.
  std::int64_t error() const noexcept { return std::int64_t{after} - before; }
  std::vector<int> flipped_bits() const;

  bool operator==(const ErrorEvent&) const = default;
};

using EventLog = std::vector<ErrorEvent>;

struct InjectionResult {
  AccumMatrix corrupted;
  EventLog events;
};

// Each (element, bit) with bit inside the window flips independently with
// probability cfg.ber. Draw order is fixed: elements row-major, bits
// ascending within an element, one uniform draw per pair.
InjectionResult sample_bitflips(const AccumMatrix& y, const FaultConfig& cfg, std::uint64_t seed);

// Exactly cfg.freq distinct positions, chosen uniformly without
// replacement, each receive +cfg.mag (wrapping 32-bit add). Events are
// logged in row-major order.
InjectionResult inject_uniform(const AccumMatrix& y, const FaultConfig& cfg, std::uint64_t seed);

// Dispatches on cfg.mode.
InjectionResult inject(const AccumMatrix& y, const FaultConfig& cfg, std::uint64_t seed);

// Writes every event's `after` value into a copy of `clean`.
AccumMatrix replay(const AccumMatrix& clean, const EventLog& events);

}  // namespace sabft
