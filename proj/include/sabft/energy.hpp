#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sabft/ber_table.hpp"
#include "sabft/detectors.hpp"
#include "sabft/systolic.hpp"
#include "sabft/workload.hpp"

namespace sabft {

// Dynamic energy only, proportional to V^2, in units of e_mac_nom.
struct EnergyConfig {
  double v_nom = 0.9;
  double e_mac_nom = 1.0;
  // Power overhead of the detection hardware, applied to compute energy at
  // the operating voltage.
  double detect_overhead = 0.0179;
  // Reported only.
  double area_overhead = 0.0142;
  VoltageBerTable table = VoltageBerTable::default_table();

  void validate() const;
};

// n_mac * e_mac_nom * (v / v_nom)^2. Throws unless 0 < v <= v_nom.
double compute_energy(double v, double n_mac, const EnergyConfig& cfg);

// compute(v) * (1 + detect_overhead) + recovery_rate * compute(v_nom).
// `none` carries no overhead and never recovers; `dmr` pays 2x compute at
// v (no checksum overhead) plus the same recovery term.
double total_energy(double v, double recovery_rate, double n_mac, const EnergyConfig& cfg,
                    DetectorKind detector = DetectorKind::classical);

// Settings shared by every simulated GEMM in compare/sweep runs.
struct TrialSetup {
  Dataflow flow = Dataflow::weight_stationary;
  ArrayConfig array{};
  StatUnitConfig stat{};
  // Ground-truth region for the quality proxy.
  CriticalRegionParams quality_region{};
};

struct DetectorStats {
  DetectorSpec detector;
  std::uint64_t trials = 0;
  std::uint64_t recoveries = 0;
  // Passed GEMMs whose injected error set is critical.
  std::uint64_t undetected_critical = 0;
  std::uint64_t freq_eff_sum = 0;
  long double msd_sum = 0;

  double recovery_rate() const noexcept { return trials ? double(recoveries) / double(trials) : 0.0; }
  double quality_proxy() const noexcept { return trials ? double(undetected_critical) / double(trials) : 0.0; }
  double mean_freq_eff() const noexcept { return trials ? double(freq_eff_sum) / double(trials) : 0.0; }
  double mean_msd() const noexcept { return trials ? double(msd_sum / trials) : 0.0; }
};

// Runs `trials` faulted GEMMs through the array and scores every detector
// on the same outputs. Operands for trial t come from
// derive_seed(input_seed, t); faults from derive_seed(fault_seed, t).
std::vector<DetectorStats> run_trials(const Workload& wl, const std::vector<DetectorSpec>& detectors,
                                      const FaultConfig& fault, std::size_t trials, std::uint64_t input_seed,
                                      std::uint64_t fault_seed, const TrialSetup& setup);

struct SweepPoint {
  double voltage = 0.0;
  double ber = 0.0;
  double recovery_rate = 0.0;
  double energy_total = 0.0;
  double latency_factor = 1.0;
  double quality_proxy = 0.0;
  DetectorKind detector = DetectorKind::none;
};

struct SweepSeries {
  DetectorSpec detector;
  std::vector<SweepPoint> points;  // one per voltage, input order
  std::size_t optimum = 0;         // index of the minimum-energy point

  const SweepPoint& best() const { return points.at(optimum); }
};

struct SweepResult {
  std::vector<SweepSeries> series;  // one per detector, input order
  double n_mac = 0.0;               // per workload (macs_per_gemm * gemm_count)

  const SweepSeries* find(DetectorKind k) const;
};

// For each voltage, `trials` GEMMs with ber = table.ber_at(v) inside
// `window`. Energy is reported for the whole workload (gemm_count GEMMs)
// using the measured recovery rate. Inputs are shared across voltages and
// detectors; fault streams are shared across detectors.
SweepResult sweep_voltage(const Workload& wl, const std::vector<DetectorSpec>& detectors,
                          const std::vector<double>& voltages, const EnergyConfig& cfg, std::size_t trials,
                          std::uint64_t seed, const BitWindow& window, const TrialSetup& setup);

}  // namespace sabft
