#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sabft/detectors.hpp"
#include "sabft/fault.hpp"

namespace sabft {

// ---- normalization amplification -------------------------------------------

enum class NormKind { layer_norm, rms_norm, none };

std::string_view to_string(NormKind k) noexcept;
NormKind parse_norm_kind(std::string_view label);

struct NormPipelineConfig {
  std::size_t dim = 4096;
  std::size_t outlier_count = 8;
  double outlier_value = 50.0;
  double base_noise_scale = 1.0;
  NormKind norm_kind = NormKind::layer_norm;
  std::uint64_t seed = 0;

  // outlier_count < dim and outlier_value >= 10 * base_noise_scale.
  void validate() const;
};

// `outlier_count` entries at outlier_value (positions drawn from the
// seed), everything else N(0, base_noise_scale^2).
std::vector<double> synthetic_hidden_state(const NormPipelineConfig& cfg);

// Affine-free LayerNorm (eps 1e-5), RMSNorm (eps 1e-6) or identity.
std::vector<double> normalize(std::span<const double> x, NormKind kind);

struct AmplificationResult {
  // Fraction of post-normalization elements whose value moved by more
  // than 1% of its clean magnitude.
  double changed_fraction = 0.0;
  double max_rel_change = 0.0;
};

AmplificationResult norm_amplification(const NormPipelineConfig& cfg, double error_mag,
                                       std::size_t error_index);

// ---- quality oracles -------------------------------------------------------

// Workload that turns an injected error set into a quality degradation
// score (0 = unaffected; larger is worse).
class QualityOracle {
 public:
  virtual ~QualityOracle() = default;
  virtual const AccumMatrix& clean_output() const = 0;
  virtual double degradation(const InjectionResult& injected) const = 0;
};

// Ground-truth critical predicate on an event log: per-element errors
// e_k = after - before, MSD = |sum e_k|, critical iff more than theta_freq
// of them satisfy log2|e_k| > b - (a - 1) log2(MSD).
bool error_set_critical(const EventLog& events, const CriticalRegionParams& p);

// Scores 1 when the injected set falls inside a planted critical region,
// 0 otherwise. Injects into an all-zero output.
class PlantedRegionOracle final : public QualityOracle {
 public:
  PlantedRegionOracle(CriticalRegionParams planted, std::size_t rows = 64, std::size_t cols = 64);

  const AccumMatrix& clean_output() const override { return clean_; }
  double degradation(const InjectionResult& injected) const override;
  const CriticalRegionParams& planted() const noexcept { return planted_; }

 private:
  CriticalRegionParams planted_;
  AccumMatrix clean_;
};

// Small GEMM -> normalization block. Output column j is one token's hidden
// state (hidden x tokens); a few weight rows carry outlier channels.
// Degradation is the mean relative L2 change of the normalized columns.
struct NormOracleConfig {
  std::size_t hidden = 256;
  std::size_t inner = 64;
  std::size_t tokens = 16;
  std::size_t outlier_channels = 4;
  NormKind norm_kind = NormKind::layer_norm;
  std::uint64_t seed = 0;
};

class NormPipelineOracle final : public QualityOracle {
 public:
  explicit NormPipelineOracle(const NormOracleConfig& cfg);

  const AccumMatrix& clean_output() const override { return clean_; }
  double degradation(const InjectionResult& injected) const override;

 private:
  std::vector<double> column(const AccumMatrix& y, std::size_t j) const;

  NormOracleConfig cfg_;
  AccumMatrix clean_;
  std::vector<std::vector<double>> clean_norm_;
};

// ---- grid + fit ------------------------------------------------------------

struct GridCell {
  double quality = 0.0;
  bool acceptable = true;
};

struct QualityGrid {
  std::vector<double> mag_axis;          // log2 magnitudes, ascending
  std::vector<std::uint64_t> freq_axis;  // ascending
  double epsilon = 0.0;
  std::vector<GridCell> cells;           // freq-major: cells[f * |mag| + m]

  const GridCell& at(std::size_t f, std::size_t m) const { return cells[f * mag_axis.size() + m]; }
  GridCell& at(std::size_t f, std::size_t m) { return cells[f * mag_axis.size() + m]; }
};

class OracleError : public std::runtime_error {
 public:
  OracleError(std::uint64_t freq, double mag_log2, const std::string& what);
  std::uint64_t freq;
  double mag_log2;
};

class NoBoundaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Averages `trials` uniform injections (mag = 2^mag_log2, freq errors) per
// cell; acceptable iff mean degradation <= epsilon.
QualityGrid quality_grid(const QualityOracle& oracle, std::vector<double> mag_axis,
                         std::vector<std::uint64_t> freq_axis, double epsilon, std::size_t trials,
                         std::uint64_t seed);

// theta_freq = largest frequency with every row at or below it acceptable
// (0 if the lowest row already fails). Above it, each row's first
// acceptable -> unacceptable step along the mag axis gives a midpoint; a
// least-squares line through those midpoints in (log2 freq, log2 mag) is
// the region edge a*log2(mag) + (a - 1)*log2(freq) = b, i.e.
// log2(mag) = b - (a - 1) log2(MSD) with MSD = freq * mag. a is kept > 1.
// With no step above theta_freq the edge is placed below the whole upper
// block (a = 2). Throws NoBoundaryError for grids with fewer than two rows
// or columns, or with no acceptable/unacceptable contrast.
CriticalRegionParams fit_critical_region(const QualityGrid& grid);

// Writes "freq,mag_log2,quality,acceptable" rows.
void write_grid_csv(std::ostream& out, const QualityGrid& grid);

}  // namespace sabft
