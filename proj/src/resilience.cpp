#include "sabft/resilience.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "sabft/csv.hpp"
#include "sabft/gemm.hpp"
#include "sabft/parallel.hpp"
#include "sabft/rng.hpp"

namespace sabft {

std::string_view to_string(NormKind k) noexcept {
  switch (k) {
    case NormKind::layer_norm: return "layer_norm";
    case NormKind::rms_norm: return "rms_norm";
    case NormKind::none: return "none";
  }
  return "?";
}

NormKind parse_norm_kind(std::string_view label) {
  for (auto k : {NormKind::layer_norm, NormKind::rms_norm, NormKind::none})
    if (to_string(k) == label) return k;
  throw InvalidInput("unknown norm kind '" + std::string(label) + "'");
}

void NormPipelineConfig::validate() const {
  if (dim == 0) throw InvalidInput("norm pipeline dim must be positive");
  if (outlier_count >= dim) throw InvalidInput("outlier_count must be smaller than dim");
  if (!(base_noise_scale >= 0.0)) throw InvalidInput("base_noise_scale must be non-negative");
  if (!(std::abs(outlier_value) >= 10.0 * base_noise_scale))
    throw InvalidInput("outlier_value must be at least 10x base_noise_scale");
}

std::vector<double> synthetic_hidden_state(const NormPipelineConfig& cfg) {
  cfg.validate();
  SplitMix64 rng(cfg.seed);
  std::vector<double> h(cfg.dim);
  for (auto& v : h) v = cfg.base_noise_scale * rng.gaussian();
  std::vector<std::size_t> idx(cfg.dim);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < cfg.outlier_count; ++i) {
    std::swap(idx[i], idx[i + rng.below(cfg.dim - i)]);
    h[idx[i]] = cfg.outlier_value;
  }
  return h;
}

std::vector<double> normalize(std::span<const double> x, NormKind kind) {
  std::vector<double> out(x.begin(), x.end());
  if (kind == NormKind::none || x.empty()) return out;
  const double n = static_cast<double>(x.size());
  if (kind == NormKind::layer_norm) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    const double inv = 1.0 / std::sqrt(var / n + 1e-5);
    for (auto& v : out) v = (v - mean) * inv;
  } else {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    const double inv = 1.0 / std::sqrt(sq / n + 1e-6);
    for (auto& v : out) v *= inv;
  }
  return out;
}

AmplificationResult norm_amplification(const NormPipelineConfig& cfg, double error_mag,
                                       std::size_t error_index) {
  if (error_index >= cfg.dim) throw InvalidInput("error_index outside the hidden state");
  std::vector<double> h = synthetic_hidden_state(cfg);
  const auto clean = normalize(h, cfg.norm_kind);
  h[error_index] += error_mag;
  const auto faulty = normalize(h, cfg.norm_kind);

  AmplificationResult r;
  std::size_t changed = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double delta = std::abs(faulty[i] - clean[i]);
    if (delta > 0.01 * std::abs(clean[i])) ++changed;
    if (delta > 0.0)
      r.max_rel_change = std::max(r.max_rel_change, clean[i] == 0.0 ? HUGE_VAL : delta / std::abs(clean[i]));
  }
  r.changed_fraction = static_cast<double>(changed) / static_cast<double>(clean.size());
  return r;
}

// ---- oracles ---------------------------------------------------------------

bool error_set_critical(const EventLog& events, const CriticalRegionParams& p) {
  std::vector<std::int64_t> errors;
  errors.reserve(events.size());
  for (const auto& e : events) errors.push_back(e.error());
  const double theta = theta_mag(matrix_sum_deviation(errors), p);
  std::uint64_t count = 0;
  for (auto e : errors)
    if (e != 0 && std::log2(static_cast<double>(magnitude(e))) > theta) ++count;
  return count > p.theta_freq;
}

PlantedRegionOracle::PlantedRegionOracle(CriticalRegionParams planted, std::size_t rows, std::size_t cols)
    : planted_(planted), clean_(rows, cols) {}

double PlantedRegionOracle::degradation(const InjectionResult& injected) const {
  return error_set_critical(injected.events, planted_) ? 1.0 : 0.0;
}

NormPipelineOracle::NormPipelineOracle(const NormOracleConfig& cfg) : cfg_(cfg) {
  if (cfg.outlier_channels >= cfg.hidden) throw InvalidInput("outlier_channels must be below hidden");
  SplitMix64 rng(cfg.seed);
  QuantMatrix w(cfg.hidden, cfg.inner), x(cfg.inner, cfg.tokens);
  for (auto& v : w.data()) v = static_cast<std::int8_t>(static_cast<int>(rng.below(9)) - 4);
  std::vector<std::size_t> rows(cfg.hidden);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  for (std::size_t i = 0; i < cfg.outlier_channels; ++i) {
    std::swap(rows[i], rows[i + rng.below(cfg.hidden - i)]);
    for (std::size_t k = 0; k < cfg.inner; ++k)
      w(rows[i], k) = static_cast<std::int8_t>(96 + static_cast<int>(rng.below(32)));
  }
  for (auto& v : x.data()) v = static_cast<std::int8_t>(static_cast<int>(rng.below(17)) - 8);
  // Outlier channels need a consistent sign to stand out after the GEMM.
  for (std::size_t k = 0; k < cfg.inner; ++k) x(k, 0) = static_cast<std::int8_t>(std::abs(x(k, 0)) + 1);
  for (std::size_t k = 0; k < cfg.inner; ++k)
    for (std::size_t j = 1; j < cfg.tokens; ++j)
      if (x(k, j) < 0) x(k, j) = static_cast<std::int8_t>(-x(k, j));
  clean_ = gemm(w, x);
  for (std::size_t j = 0; j < cfg.tokens; ++j) clean_norm_.push_back(normalize(column(clean_, j), cfg.norm_kind));
}

std::vector<double> NormPipelineOracle::column(const AccumMatrix& y, std::size_t j) const {
  std::vector<double> c(y.rows());
  for (std::size_t i = 0; i < y.rows(); ++i) c[i] = y(i, j);
  return c;
}

double NormPipelineOracle::degradation(const InjectionResult& injected) const {
  double total = 0.0;
  for (std::size_t j = 0; j < cfg_.tokens; ++j) {
    const auto faulty = normalize(column(injected.corrupted, j), cfg_.norm_kind);
    const auto& clean = clean_norm_[j];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      num += (faulty[i] - clean[i]) * (faulty[i] - clean[i]);
      den += clean[i] * clean[i];
    }
    total += den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  }
  return total / static_cast<double>(cfg_.tokens);
}

// ---- grid ------------------------------------------------------------------

OracleError::OracleError(std::uint64_t f, double m, const std::string& what)
    : std::runtime_error("oracle failed at cell (freq=" + std::to_string(f) + ", mag_log2=" + csv::real(m) +
                         "): " + what),
      freq(f),
      mag_log2(m) {}

QualityGrid quality_grid(const QualityOracle& oracle, std::vector<double> mag_axis,
                         std::vector<std::uint64_t> freq_axis, double epsilon, std::size_t trials,
                         std::uint64_t seed) {
  if (mag_axis.empty() || freq_axis.empty()) throw InvalidInput("quality grid axes must be non-empty");
  if (trials == 0) throw InvalidInput("quality grid needs at least one trial per cell");
  if (!std::is_sorted(mag_axis.begin(), mag_axis.end()) ||
      std::adjacent_find(mag_axis.begin(), mag_axis.end()) != mag_axis.end())
    throw InvalidInput("mag axis must be strictly ascending");
  if (!std::is_sorted(freq_axis.begin(), freq_axis.end()) ||
      std::adjacent_find(freq_axis.begin(), freq_axis.end()) != freq_axis.end())
    throw InvalidInput("freq axis must be strictly ascending");
  for (double m : mag_axis)
    if (!(m >= 0.0 && m <= 30.0)) throw InvalidInput("mag_log2 values must lie in [0, 30]");

  QualityGrid grid{std::move(mag_axis), std::move(freq_axis), epsilon, {}};
  const std::size_t nm = grid.mag_axis.size();
  grid.cells.resize(grid.freq_axis.size() * nm);

  parallel_for(grid.cells.size(), [&](std::size_t cell) {
    const std::uint64_t freq = grid.freq_axis[cell / nm];
    const double mag_log2 = grid.mag_axis[cell % nm];
    FaultConfig fc;
    fc.mode = FaultMode::uniform;
    fc.freq = freq;
    fc.mag = static_cast<std::int32_t>(std::llround(std::exp2(mag_log2)));
    double sum = 0.0;
    try {
      for (std::size_t t = 0; t < trials; ++t)
        sum += oracle.degradation(inject_uniform(oracle.clean_output(), fc, derive_seed(seed, cell, t)));
    } catch (const std::exception& e) {
      throw OracleError(freq, mag_log2, e.what());
    }
    GridCell& c = grid.cells[cell];
    c.quality = sum / static_cast<double>(trials);
    c.acceptable = c.quality <= epsilon;
  });
  return grid;
}

CriticalRegionParams fit_critical_region(const QualityGrid& grid) {
  const std::size_t nf = grid.freq_axis.size(), nm = grid.mag_axis.size();
  if (nf < 2 || nm < 2) throw NoBoundaryError("grid needs at least two frequencies and two magnitudes");
  const auto acceptable = std::count_if(grid.cells.begin(), grid.cells.end(),
                                        [](const GridCell& c) { return c.acceptable; });
  if (acceptable == 0) throw NoBoundaryError("every grid cell is unacceptable");
  if (static_cast<std::size_t>(acceptable) == grid.cells.size())
    throw NoBoundaryError("every grid cell is acceptable");

  CriticalRegionParams p;
  p.theta_freq = 0;
  std::size_t first_inclined_row = 0;
  for (std::size_t f = 0; f < nf; ++f) {
    bool row_ok = true;
    for (std::size_t m = 0; m < nm; ++m) row_ok = row_ok && grid.at(f, m).acceptable;
    if (!row_ok) break;
    p.theta_freq = grid.freq_axis[f];
    first_inclined_row = f + 1;
  }

  // The region boundary a*m + (a-1)*log2(f) = b is a line m = c + s*log2(f)
  // with s = -(a-1)/a and c = b/a. Each row above theta_freq contributes the
  // midpoint of its first acceptable -> unacceptable step along the mag axis.
  std::vector<std::pair<double, double>> pts;
  for (std::size_t f = first_inclined_row; f < nf; ++f) {
    if (grid.freq_axis[f] == 0) continue;
    for (std::size_t m = 1; m < nm; ++m) {
      if (grid.at(f, m - 1).acceptable && !grid.at(f, m).acceptable) {
        pts.emplace_back(std::log2(static_cast<double>(grid.freq_axis[f])),
                         (grid.mag_axis[m - 1] + grid.mag_axis[m]) / 2);
        break;
      }
    }
  }

  constexpr double kMinExcess = 1e-6;
  p.a = 2.0;
  if (pts.empty()) {
    // Pure horizontal boundary: put the line below every cell above theta_freq.
    const std::size_t row = std::min(first_inclined_row, nf - 1);
    const double lf = std::log2(std::max<double>(1.0, static_cast<double>(grid.freq_axis[row])));
    p.b = p.a * grid.mag_axis.front() + (p.a - 1.0) * lf - 1.0;
    return p;
  }
  const double n = static_cast<double>(pts.size());
  double mean_l = 0.0, mean_m = 0.0;
  for (auto [l, m] : pts) mean_l += l, mean_m += m;
  mean_l /= n;
  mean_m /= n;
  double sxx = 0.0, sxy = 0.0;
  for (auto [l, m] : pts) {
    sxx += (l - mean_l) * (l - mean_l);
    sxy += (l - mean_l) * (m - mean_m);
  }
  // A single row leaves the slope unidentifiable; keep a = 2 through its midpoint.
  if (sxx > 0.0) {
    const double s = std::clamp(sxy / sxx, -1.0 + kMinExcess, 0.0);
    p.a = std::max(1.0 / (1.0 + s), 1.0 + kMinExcess);
  }
  p.b = p.a * mean_m + (p.a - 1.0) * mean_l;
  return p;
}

void write_grid_csv(std::ostream& out, const QualityGrid& grid) {
  out << "freq,mag_log2,quality,acceptable\n";
  for (std::size_t f = 0; f < grid.freq_axis.size(); ++f)
    for (std::size_t m = 0; m < grid.mag_axis.size(); ++m) {
      const auto& c = grid.at(f, m);
      out << grid.freq_axis[f] << ',' << csv::real(grid.mag_axis[m]) << ',' << csv::real(c.quality) << ','
          << (c.acceptable ? 1 : 0) << '\n';
    }
}

}  // namespace sabft
