#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sabft/detectors.hpp"
#include "sabft/fault.hpp"
#include "sabft/matrix.hpp"

namespace sabft {

enum class Dataflow { weight_stationary, output_stationary };

std::string_view to_string(Dataflow f) noexcept;
Dataflow parse_dataflow(std::string_view label);

enum class Log2Mode {
  exact,  // real log2 on both sides of the comparison
  lzc,    // leading-zero-count floor log2 for |d_j|, fixed-point threshold
};

struct StatUnitConfig {
  CriticalRegionParams params{};
  Log2Mode log2_mode = Log2Mode::exact;
  // Fractional bits of log2(MSD) inside the Log2LinearFunction (lzc mode).
  unsigned fixed_point_frac_bits = 4;

  void validate() const;
};

// Physical array size. Without tiling, a GEMM that does not fit in one pass
// is rejected.
struct ArrayConfig {
  std::size_t rows = 256;
  std::size_t cols = 256;
  bool tiling = true;
};

struct SimResult {
  AccumMatrix output;
  ChecksumVector predicted;  // e^T W X via the augmented PE path
  ChecksumVector observed;   // e^T Y accumulated from the (faulty) outputs
  std::uint64_t cycles = 0;
  DetectionVerdict verdict;
  EventLog events;
};

// Closed-form latency. One pass over an m x k x n tile costs
// m + n + k - 2 fill/drain cycles plus one checksum-accumulate cycle;
// tiled GEMMs pay that per tile. `checksum_stage = false` gives the
// unprotected array's latency.
//   WS: weights are pinned, K along array rows and M along array columns.
//   OS: outputs are pinned, M along array rows and N along array columns.
std::uint64_t cycle_count(std::size_t m, std::size_t k, std::size_t n, Dataflow flow,
                          const ArrayConfig& array, bool checksum_stage = true);

// Runs Y = W X on the checksum-augmented array. Faults (if any) hit the
// INT32 outputs; the checksum row/column and the statistical unit are
// assumed fault-free.
SimResult run_array(const QuantMatrix& w, const QuantMatrix& x, Dataflow flow,
                    const std::optional<FaultConfig>& fault, const StatUnitConfig& stat,
                    const ArrayConfig& array = {});

// Behavioral model of the statistical unit: a subtractor feeding n
// difference buffers and an MSD accumulator, a Log2LinearFunction block
// and a countif comparator over the buffers.
class StatisticalUnit {
 public:
  explicit StatisticalUnit(const StatUnitConfig& cfg) : cfg_(cfg) {}

  void feed(std::int64_t predicted, std::int64_t observed);
  DetectionVerdict finish() const;

 private:
  StatUnitConfig cfg_;
  std::vector<std::int64_t> buffers_;
  int128 accumulator_ = 0;
};

DetectionVerdict statistical_unit(const ChecksumVector& predicted, const ChecksumVector& observed,
                                  const StatUnitConfig& stat);

// ---- lzc-mode arithmetic, exposed for testing ----------------------------

// 63 - lzc(x) for x > 0.
int floor_log2(std::uint64_t x) noexcept;

// ceil(log2(x) * 2^frac_bits) for x >= 1, computed with integer
// operations only (bit-serial squaring of the normalized mantissa).
std::int64_t log2_fixed_ceil(std::uint64_t x, unsigned frac_bits) noexcept;

// Fitted parameters are held in Q16 registers: the slope (a - 1) rounded
// up, the intercept b rounded down.
inline constexpr unsigned kParamFracBits = 16;

// theta_mag as evaluated by the Log2LinearFunction in lzc mode, in Q16.
// Every rounding step is directed downward, so the result never exceeds
// the exact threshold. nullopt for MSD == 0 (threshold +inf).
std::optional<std::int64_t> fixed_theta_mag_q16(std::uint64_t msd, const StatUnitConfig& stat);

// True when the exact and lzc verdicts are allowed to differ for this
// difference vector: some nonzero |d_j| has |log2|d_j| - theta_mag| <= 1,
// or the fixed-point threshold lies outside (theta_mag - 1, theta_mag].
bool lzc_ambiguous(const std::vector<std::int64_t>& diff, const StatUnitConfig& stat);

}  // namespace sabft
