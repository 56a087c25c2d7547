#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "sabft/matrix.hpp"

namespace sabft {

// Fitted boundary of the critical error region: an inclined line with
// slope `a` (> 1) and intercept -`b`, and a horizontal frequency bound.
struct CriticalRegionParams {
  double a = 2.0;
  double b = 40.0;
  std::uint64_t theta_freq = 4;

  // Throws InvalidInput unless a > 1 and b is finite.
  void validate() const;

  bool operator==(const CriticalRegionParams&) const = default;
};

// Predicted vs observed per-column output checksums and their difference
// d_j = predicted_j - observed_j.
class ChecksumPair {
 public:
  ChecksumPair(ChecksumVector predicted, ChecksumVector observed);

  // Pair whose difference vector is exactly `diff` (observed = 0).
  static ChecksumPair from_diff(std::vector<std::int64_t> diff);

  const ChecksumVector& predicted() const noexcept { return predicted_; }
  const ChecksumVector& observed() const noexcept { return observed_; }
  const std::vector<std::int64_t>& diff() const noexcept { return diff_; }

 private:
  ChecksumVector predicted_;
  ChecksumVector observed_;
  std::vector<std::int64_t> diff_;
};

enum class DetectorKind { none, classical, msd, statistical, dmr };

std::string_view to_string(DetectorKind k) noexcept;
// Throws InvalidInput on an unknown label.
DetectorKind parse_detector_kind(std::string_view label);

enum class Decision { pass, recover };

struct DetectionVerdict {
  std::uint64_t msd = 0;
  // Magnitude threshold in log2 units. +inf when MSD is 0; -inf for the
  // detectors that count every nonzero difference.
  double theta_mag = std::numeric_limits<double>::infinity();
  std::uint64_t freq_eff = 0;
  Decision decision = Decision::pass;
  DetectorKind detector = DetectorKind::none;

  bool recover() const noexcept { return decision == Decision::recover; }
  bool operator==(const DetectionVerdict&) const = default;
};

// |sum_j d_j|, saturating at UINT64_MAX.
std::uint64_t matrix_sum_deviation(const std::vector<std::int64_t>& diff) noexcept;

// |d| without overflow on INT64_MIN.
inline std::uint64_t magnitude(std::int64_t d) noexcept {
  return d < 0 ? std::uint64_t{0} - static_cast<std::uint64_t>(d) : static_cast<std::uint64_t>(d);
}

// Recover iff any column difference is nonzero.
DetectionVerdict detect_classical(const ChecksumPair& cs);

// Recover iff MSD > threshold.
DetectionVerdict detect_msd(const ChecksumPair& cs, std::uint64_t threshold);

// b - (a - 1) log2(msd); +inf for msd == 0. Does not validate `p`.
double theta_mag(std::uint64_t msd, const CriticalRegionParams& p) noexcept;

// freq_eff = #{j : d_j != 0 and log2|d_j| > theta_mag(MSD)};
// recover iff freq_eff > theta_freq.
DetectionVerdict detect_statistical(const ChecksumPair& cs, const CriticalRegionParams& p);

struct DetectorSpec {
  DetectorKind kind = DetectorKind::statistical;
  CriticalRegionParams params{};
  std::uint64_t msd_threshold = 0;
};

// `none` always passes; `dmr` is modeled as perfect detection and recovers
// exactly when classical ABFT would.
DetectionVerdict detect(const ChecksumPair& cs, const DetectorSpec& spec);

// Params document: JSON object {"a", "b", "theta_freq", "provenance"}.
struct ParamsDocument {
  CriticalRegionParams params;
  std::string provenance;
};

void write_params(std::ostream& out, const ParamsDocument& doc);
ParamsDocument read_params(std::istream& in);
void save_params(const std::string& path, const ParamsDocument& doc);
ParamsDocument load_params(const std::string& path);

}  // namespace sabft
