#include "sabft/fault.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sabft/rng.hpp"

namespace sabft {
namespace {

std::int32_t wrapping_add(std::int32_t a, std::int32_t b) noexcept {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) + static_cast<std::uint32_t>(b));
}

// First `count` entries of a partial Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> choose_distinct(std::size_t n, std::size_t count, SplitMix64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

}  // namespace

void FaultConfig::validate(std::size_t rows, std::size_t cols) const {
  if (mode == FaultMode::ber) {
    if (!(ber >= 0.0 && ber <= 1.0)) throw InvalidInput("ber must lie in [0, 1]");
    if (!bit_window.valid())
      throw InvalidInput("bit window [" + std::to_string(bit_window.lo) + ", " +
                         std::to_string(bit_window.hi) + "] is not inside [0, 31]");
    return;
  }
  if (freq > rows * cols)
    throw InvalidInput("freq " + std::to_string(freq) + " exceeds the " +
                       std::to_string(rows * cols) + " output elements");
  if (distinct_columns && freq > cols)
    throw InvalidInput("freq " + std::to_string(freq) + " exceeds the " + std::to_string(cols) +
                       " output columns");
  if (freq > 0 && mag == 0) throw InvalidInput("uniform injection needs a nonzero mag");
}

std::vector<int> ErrorEvent::flipped_bits() const {
  std::vector<int> bits;
  for (int b = 0; b < 32; ++b)
    if (flip_mask >> b & 1U) bits.push_back(b);
  return bits;
}

InjectionResult sample_bitflips(const AccumMatrix& y, const FaultConfig& cfg, std::uint64_t seed) {
  if (cfg.mode != FaultMode::ber) throw InvalidInput("sample_bitflips needs a ber-mode config");
  cfg.validate(y.rows(), y.cols());

  InjectionResult out{y, {}};
  if (cfg.ber <= 0.0) return out;

  SplitMix64 rng(seed);
  for (std::size_t r = 0; r < y.rows(); ++r) {
    for (std::size_t c = 0; c < y.cols(); ++c) {
      std::uint32_t mask = 0;
      for (int b = cfg.bit_window.lo; b <= cfg.bit_window.hi; ++b)
        if (rng.bernoulli(cfg.ber)) mask |= 1U << b;
      if (mask == 0) continue;
      const std::int32_t before = y(r, c);
      const auto after = static_cast<std::int32_t>(static_cast<std::uint32_t>(before) ^ mask);
      out.corrupted(r, c) = after;
      out.events.push_back({r, c, before, after, mask});
    }
  }
  return out;
}

InjectionResult inject_uniform(const AccumMatrix& y, const FaultConfig& cfg, std::uint64_t seed) {
  if (cfg.mode != FaultMode::uniform) throw InvalidInput("inject_uniform needs a uniform-mode config");
  cfg.validate(y.rows(), y.cols());

  InjectionResult out{y, {}};
  if (cfg.freq == 0) return out;

  SplitMix64 rng(seed);
  const auto count = static_cast<std::size_t>(cfg.freq);
  std::vector<std::size_t> flat;
  if (cfg.distinct_columns) {
    for (std::size_t c : choose_distinct(y.cols(), count, rng))
      flat.push_back(static_cast<std::size_t>(rng.below(y.rows())) * y.cols() + c);
  } else {
    flat = choose_distinct(y.size(), count, rng);
  }
  std::sort(flat.begin(), flat.end());

  for (std::size_t pos : flat) {
    const std::size_t r = pos / y.cols(), c = pos % y.cols();
    std::int32_t delta = cfg.mag;
    if (cfg.signed_mix && (rng() & 1U)) delta = wrapping_add(~cfg.mag, 1);
    const std::int32_t before = y(r, c);
    const std::int32_t after = wrapping_add(before, delta);
    out.corrupted(r, c) = after;
    out.events.push_back({r, c, before, after, 0});
  }
  return out;
}

InjectionResult inject(const AccumMatrix& y, const FaultConfig& cfg, std::uint64_t seed) {
  return cfg.mode == FaultMode::ber ? sample_bitflips(y, cfg, seed) : inject_uniform(y, cfg, seed);
}

AccumMatrix replay(const AccumMatrix& clean, const EventLog& events) {
  AccumMatrix out = clean;
  for (const auto& e : events) {
    if (e.row >= out.rows() || e.col >= out.cols()) throw InvalidInput("event outside the matrix");
    if (out(e.row, e.col) != e.before) throw InvalidInput("event log does not match the clean matrix");
    out(e.row, e.col) = e.after;
  }
  return out;
}

}  // namespace sabft
