#include "sabft/detectors.hpp"

#include <cmath>
#include <string>

namespace sabft {

void CriticalRegionParams::validate() const {
  if (!(a > 1.0)) throw InvalidInput("critical region slope a must be > 1");
  if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidInput("critical region params must be finite");
}

ChecksumPair::ChecksumPair(ChecksumVector predicted, ChecksumVector observed)
    : predicted_(std::move(predicted)), observed_(std::move(observed)) {
  if (predicted_.size() != observed_.size())
    throw InvalidInput("predicted and observed checksums differ in length");
  diff_.resize(predicted_.size());
  for (std::size_t j = 0; j < diff_.size(); ++j) diff_[j] = predicted_.data[j] - observed_.data[j];
}

ChecksumPair ChecksumPair::from_diff(std::vector<std::int64_t> diff) {
  ChecksumVector zero{std::vector<std::int64_t>(diff.size(), 0), ChecksumSide::row};
  return ChecksumPair(ChecksumVector{std::move(diff), ChecksumSide::row}, std::move(zero));
}

std::string_view to_string(DetectorKind k) noexcept {
  switch (k) {
    case DetectorKind::none: return "none";
    case DetectorKind::classical: return "classical";
    case DetectorKind::msd: return "msd";
    case DetectorKind::statistical: return "statistical";
    case DetectorKind::dmr: return "dmr";
  }
  return "?";
}

DetectorKind parse_detector_kind(std::string_view label) {
  for (auto k : {DetectorKind::none, DetectorKind::classical, DetectorKind::msd,
                 DetectorKind::statistical, DetectorKind::dmr})
    if (to_string(k) == label) return k;
  throw InvalidInput("unknown detector kind '" + std::string(label) + "'");
}

std::uint64_t matrix_sum_deviation(const std::vector<std::int64_t>& diff) noexcept {
  int128 sum = 0;
  for (auto d : diff) sum += d;
  if (sum < 0) sum = -sum;
  constexpr auto kMax = static_cast<int128>(std::numeric_limits<std::uint64_t>::max());
  return static_cast<std::uint64_t>(sum > kMax ? kMax : sum);
}

namespace {

std::uint64_t count_nonzero(const std::vector<std::int64_t>& diff) {
  std::uint64_t n = 0;
  for (auto d : diff) n += d != 0;
  return n;
}

}  // namespace

DetectionVerdict detect_classical(const ChecksumPair& cs) {
  DetectionVerdict v;
  v.detector = DetectorKind::classical;
  v.msd = matrix_sum_deviation(cs.diff());
  v.theta_mag = -std::numeric_limits<double>::infinity();
  v.freq_eff = count_nonzero(cs.diff());
  v.decision = v.freq_eff > 0 ? Decision::recover : Decision::pass;
  return v;
}

DetectionVerdict detect_msd(const ChecksumPair& cs, std::uint64_t threshold) {
  DetectionVerdict v;
  v.detector = DetectorKind::msd;
  v.msd = matrix_sum_deviation(cs.diff());
  v.theta_mag = -std::numeric_limits<double>::infinity();
  v.freq_eff = count_nonzero(cs.diff());
  v.decision = v.msd > threshold ? Decision::recover : Decision::pass;
  return v;
}

double theta_mag(std::uint64_t msd, const CriticalRegionParams& p) noexcept {
  if (msd == 0) return std::numeric_limits<double>::infinity();
  return p.b - (p.a - 1.0) * std::log2(static_cast<double>(msd));
}

DetectionVerdict detect_statistical(const ChecksumPair& cs, const CriticalRegionParams& p) {
  DetectionVerdict v;
  v.detector = DetectorKind::statistical;
  v.msd = matrix_sum_deviation(cs.diff());
  v.theta_mag = theta_mag(v.msd, p);
  for (auto d : cs.diff()) {
    if (d == 0) continue;
    if (std::log2(static_cast<double>(magnitude(d))) > v.theta_mag) ++v.freq_eff;
  }
  v.decision = v.freq_eff > p.theta_freq ? Decision::recover : Decision::pass;
  return v;
}

DetectionVerdict detect(const ChecksumPair& cs, const DetectorSpec& spec) {
  switch (spec.kind) {
    case DetectorKind::classical: return detect_classical(cs);
    case DetectorKind::msd: return detect_msd(cs, spec.msd_threshold);
    case DetectorKind::statistical: return detect_statistical(cs, spec.params);
    case DetectorKind::dmr: {
      auto v = detect_classical(cs);
      v.detector = DetectorKind::dmr;
      return v;
    }
    case DetectorKind::none: break;
  }
  DetectionVerdict v;
  v.detector = DetectorKind::none;
  v.msd = matrix_sum_deviation(cs.diff());
  v.freq_eff = 0;
  return v;
}

}  // namespace sabft
