#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sabft/config.hpp"

namespace sabft {

// Every command writes its artifacts under cfg.output_dir (created on
// demand) next to config.resolved.json, and returns what it wrote for
// callers that want to inspect results directly.

struct CalibrateOutcome {
  QualityGrid grid;
  CriticalRegionParams params;
};
// Throws NoBoundaryError when the grid has no acceptable/unacceptable edge.
CalibrateOutcome cmd_calibrate(const ExperimentConfig& cfg, std::ostream& log);

struct CompareOutcome {
  double ber = 0.0;
  std::vector<DetectorStats> stats;
};
CompareOutcome cmd_compare(const ExperimentConfig& cfg, std::ostream& log);

struct DetectorSaving {
  DetectorKind detector = DetectorKind::none;
  double optimal_voltage = 0.0;
  double energy_total = 0.0;
  std::optional<double> saving_vs_classical;  // absent when classical is not swept
  double saving_vs_nominal = 0.0;             // vs unprotected compute at v_nom
};

struct SweepOutcome {
  SweepResult sweep;
  std::vector<DetectorSaving> summary;
};
SweepOutcome cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);

// Single-GEMM debugging dump: operands, clean/faulty outputs, event log,
// checksums and every detector's verdict.
SimResult cmd_inject(const ExperimentConfig& cfg, std::ostream& log);

struct VerifyOptions {
  std::size_t cases = 200;  // randomized cases per check (minimum)
  std::uint64_t seed = 1;
  // Test hook: deliberately breaks the named check's implementation side.
  std::optional<std::string> corrupt;
};

struct CheckResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  bool passed() const noexcept { return failures == 0; }
};

std::vector<std::string> verify_check_names();
// Runs the built-in oracle suite and prints one line per check.
std::vector<CheckResult> cmd_verify(const VerifyOptions& opts, std::ostream& log);

}  // namespace sabft
