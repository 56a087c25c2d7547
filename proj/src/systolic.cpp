#include "sabft/systolic.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "sabft/gemm.hpp"

namespace sabft {

std::string_view to_string(Dataflow f) noexcept {
  return f == Dataflow::weight_stationary ? "ws" : "os";
}

Dataflow parse_dataflow(std::string_view label) {
  if (label == "ws" || label == "weight_stationary") return Dataflow::weight_stationary;
  if (label == "os" || label == "output_stationary") return Dataflow::output_stationary;
  throw InvalidInput("unknown dataflow '" + std::string(label) + "'");
}

void StatUnitConfig::validate() const {
  params.validate();
  if (fixed_point_frac_bits > 16) throw InvalidInput("fixed_point_frac_bits must be <= 16");
}

namespace {

// Tile extents along one dimension.
std::vector<std::size_t> tiles(std::size_t extent, std::size_t capacity) {
  std::vector<std::size_t> out;
  for (std::size_t done = 0; done < extent; done += capacity) out.push_back(std::min(capacity, extent - done));
  return out;
}

void check_fit(std::size_t m, std::size_t k, std::size_t n, Dataflow flow, const ArrayConfig& array) {
  if (array.rows == 0 || array.cols == 0) throw InvalidInput("array dimensions must be positive");
  if (m == 0 || k == 0 || n == 0) throw InvalidInput("GEMM dimensions must be positive");
  if (array.tiling) return;
  const bool fits = flow == Dataflow::weight_stationary ? (k <= array.rows && m <= array.cols)
                                                       : (m <= array.rows && n <= array.cols);
  if (!fits)
    throw InvalidInput("GEMM " + std::to_string(m) + "x" + std::to_string(k) + "x" + std::to_string(n) +
                       " does not fit a " + std::to_string(array.rows) + "x" + std::to_string(array.cols) +
                       " array with tiling disabled");
}

// WS: e^T W sits preloaded in an extra PE column on the right edge, one
// entry per array row (k). Each streamed input column X[:, j] meets it and
// the partial sums flowing down that column yield (e^T W X)_j. K is split
// across row tiles; their partial results add.
ChecksumVector ws_predicted(const QuantMatrix& w, const QuantMatrix& x, const ArrayConfig& array) {
  const std::size_t k_cap = array.tiling ? array.rows : w.cols();
  std::vector<std::int64_t> wsum(w.cols(), 0);
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t p = 0; p < w.cols(); ++p) wsum[p] += w(i, p);

  ChecksumVector out{std::vector<std::int64_t>(x.cols(), 0), ChecksumSide::row};
  for (std::size_t k0 = 0; k0 < w.cols(); k0 += k_cap) {
    const std::size_t k1 = std::min(w.cols(), k0 + k_cap);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      std::int64_t psum = 0;
      for (std::size_t p = k0; p < k1; ++p) psum += wsum[p] * x(p, j);
      out.data[j] += psum;
    }
  }
  return out;
}

// OS: a column of adders on the left edge reduces each incoming weight
// column to (e^T W)_k; the value is routed into an extra PE row at the
// bottom where it meets X[k, :] flowing down and accumulates in place.
ChecksumVector os_predicted(const QuantMatrix& w, const QuantMatrix& x) {
  ChecksumVector out{std::vector<std::int64_t>(x.cols(), 0), ChecksumSide::row};
  for (std::size_t p = 0; p < w.cols(); ++p) {
    std::int64_t col_sum = 0;
    for (std::size_t i = 0; i < w.rows(); ++i) col_sum += w(i, p);
    for (std::size_t j = 0; j < x.cols(); ++j) out.data[j] += col_sum * x(p, j);
  }
  return out;
}

// Bottom row of adders: one running sum per output column.
ChecksumVector observed_checksum(const AccumMatrix& y) {
  ChecksumVector out{std::vector<std::int64_t>(y.cols(), 0), ChecksumSide::row};
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j) out.data[j] += y(i, j);
  return out;
}

}  // namespace

std::uint64_t cycle_count(std::size_t m, std::size_t k, std::size_t n, Dataflow flow,
                          const ArrayConfig& array, bool checksum_stage) {
  check_fit(m, k, n, flow, array);
  const std::uint64_t extra = checksum_stage ? 1 : 0;
  std::uint64_t total = 0;
  if (flow == Dataflow::weight_stationary) {
    for (auto kt : tiles(k, array.tiling ? array.rows : k))
      for (auto mt : tiles(m, array.tiling ? array.cols : m)) total += mt + n + kt - 2 + extra;
  } else {
    for (auto mt : tiles(m, array.tiling ? array.rows : m))
      for (auto nt : tiles(n, array.tiling ? array.cols : n)) total += mt + nt + k - 2 + extra;
  }
  return total;
}

SimResult run_array(const QuantMatrix& w, const QuantMatrix& x, Dataflow flow,
                    const std::optional<FaultConfig>& fault, const StatUnitConfig& stat,
                    const ArrayConfig& array) {
  if (w.cols() != x.rows()) throw InvalidInput("run_array: inner dimensions differ");
  check_fit(w.rows(), w.cols(), x.cols(), flow, array);

  SimResult res;
  res.output = gemm(w, x);
  res.predicted = flow == Dataflow::weight_stationary ? ws_predicted(w, x, array) : os_predicted(w, x);
  if (fault) {
    auto injected = inject(res.output, *fault, fault->seed);
    res.output = std::move(injected.corrupted);
    res.events = std::move(injected.events);
  }
  res.observed = observed_checksum(res.output);
  res.cycles = cycle_count(w.rows(), w.cols(), x.cols(), flow, array);
  res.verdict = statistical_unit(res.predicted, res.observed, stat);
  return res;
}

// ---- statistical unit ------------------------------------------------------

int floor_log2(std::uint64_t x) noexcept { return 63 - std::countl_zero(x); }

std::int64_t log2_fixed_ceil(std::uint64_t x, unsigned frac_bits) noexcept {
  const int k = floor_log2(x);
  const std::int64_t whole = std::int64_t{k} << frac_bits;
  if (std::has_single_bit(x)) return whole;

  // Mantissa x / 2^k in Q62, in [1, 2).
  constexpr int kQ = 62;
  std::uint64_t m = k <= kQ ? x << (kQ - k) : x >> (k - kQ);
  std::int64_t frac = 0;
  for (unsigned i = 0; i < frac_bits; ++i) {
    const auto sq = static_cast<uint128>(m) * m;
    m = static_cast<std::uint64_t>(sq >> kQ);  // in [1, 4)
    frac <<= 1;
    if (m >> (kQ + 1)) {
      frac |= 1;
      m >>= 1;
    }
  }
  // x is not a power of two, so log2(x) is irrational and never lands on
  // the fixed-point grid: the ceiling is one step above the floor.
  return whole + frac + 1;
}

std::optional<std::int64_t> fixed_theta_mag_q16(std::uint64_t msd, const StatUnitConfig& stat) {
  if (msd == 0) return std::nullopt;
  constexpr double kOne = 1 << kParamFracBits;
  const auto slope = static_cast<std::int64_t>(std::ceil((stat.params.a - 1.0) * kOne));
  const auto intercept = static_cast<std::int64_t>(std::floor(stat.params.b * kOne));
  const unsigned f = stat.fixed_point_frac_bits;
  const int128 prod = static_cast<int128>(slope) * log2_fixed_ceil(msd, f);
  // ceil(prod / 2^f) for either sign.
  const int128 scaled = prod >= 0 ? (prod + ((int128{1} << f) - 1)) >> f : -((-prod) >> f);
  return static_cast<std::int64_t>(intercept - scaled);
}

void StatisticalUnit::feed(std::int64_t predicted, std::int64_t observed) {
  const std::int64_t d = predicted - observed;
  buffers_.push_back(d);
  accumulator_ += d;
}

DetectionVerdict StatisticalUnit::finish() const {
  DetectionVerdict v;
  v.detector = DetectorKind::statistical;
  const int128 abs_sum = accumulator_ < 0 ? -accumulator_ : accumulator_;
  constexpr auto kMax = static_cast<int128>(std::numeric_limits<std::uint64_t>::max());
  v.msd = static_cast<std::uint64_t>(abs_sum > kMax ? kMax : abs_sum);

  if (cfg_.log2_mode == Log2Mode::exact) {
    v.theta_mag = v.msd == 0 ? std::numeric_limits<double>::infinity()
                             : cfg_.params.b - (cfg_.params.a - 1.0) * std::log2(static_cast<double>(v.msd));
    for (auto d : buffers_)
      if (d != 0 && std::log2(static_cast<double>(magnitude(d))) > v.theta_mag) ++v.freq_eff;
  } else {
    const auto theta_q16 = fixed_theta_mag_q16(v.msd, cfg_);
    if (!theta_q16) {
      v.theta_mag = std::numeric_limits<double>::infinity();
    } else {
      v.theta_mag = static_cast<double>(*theta_q16) / (1 << kParamFracBits);
      for (auto d : buffers_) {
        if (d == 0) continue;
        const std::int64_t lg_q16 = std::int64_t{floor_log2(magnitude(d))} << kParamFracBits;
        if (lg_q16 > *theta_q16) ++v.freq_eff;
      }
    }
  }
  v.decision = v.freq_eff > cfg_.params.theta_freq ? Decision::recover : Decision::pass;
  return v;
}

DetectionVerdict statistical_unit(const ChecksumVector& predicted, const ChecksumVector& observed,
                                  const StatUnitConfig& stat) {
  if (predicted.size() != observed.size())
    throw InvalidInput("statistical unit: checksum lengths differ");
  StatisticalUnit unit(stat);
  for (std::size_t j = 0; j < predicted.size(); ++j) unit.feed(predicted.data[j], observed.data[j]);
  return unit.finish();
}

bool lzc_ambiguous(const std::vector<std::int64_t>& diff, const StatUnitConfig& stat) {
  const std::uint64_t msd = matrix_sum_deviation(diff);
  const double exact = theta_mag(msd, stat.params);
  if (std::isinf(exact)) return false;
  constexpr double kTol = 1e-9;
  const double fixed = static_cast<double>(*fixed_theta_mag_q16(msd, stat)) / (1 << kParamFracBits);
  if (fixed > exact + kTol || fixed < exact - 1.0 - kTol) return true;
  for (auto d : diff) {
    if (d == 0) continue;
    if (std::abs(std::log2(static_cast<double>(magnitude(d))) - exact) <= 1.0 + kTol) return true;
  }
  return false;
}

}  // namespace sabft
