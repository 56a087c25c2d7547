#include "sabft/energy.hpp"

#include <string>

#include "sabft/parallel.hpp"
#include "sabft/resilience.hpp"
#include "sabft/rng.hpp"

namespace sabft {

void EnergyConfig::validate() const {
  if (!(v_nom > 0.0)) throw InvalidInput("v_nom must be positive");
  if (!(e_mac_nom > 0.0)) throw InvalidInput("e_mac_nom must be positive");
  if (!(detect_overhead >= 0.0)) throw InvalidInput("detect_overhead must be non-negative");
  if (!(area_overhead >= 0.0)) throw InvalidInput("area_overhead must be non-negative");
}

double compute_energy(double v, double n_mac, const EnergyConfig& cfg) {
  if (!(v > 0.0 && v <= cfg.v_nom))
    throw InvalidInput("voltage " + std::to_string(v) + " outside (0, v_nom]");
  const double ratio = v / cfg.v_nom;
  return n_mac * cfg.e_mac_nom * ratio * ratio;
}

double total_energy(double v, double recovery_rate, double n_mac, const EnergyConfig& cfg,
                    DetectorKind detector) {
  if (!(recovery_rate >= 0.0 && recovery_rate <= 1.0)) throw InvalidInput("recovery rate must lie in [0, 1]");
  const double compute = compute_energy(v, n_mac, cfg);
  const double recovery = recovery_rate * compute_energy(cfg.v_nom, n_mac, cfg);
  switch (detector) {
    case DetectorKind::none: return compute;
    case DetectorKind::dmr: return 2.0 * compute + recovery;
    default: return compute * (1.0 + cfg.detect_overhead) + recovery;
  }
}

namespace {

struct TrialOutcome {
  bool critical = false;
  std::vector<DetectionVerdict> verdicts;
};

}  // namespace

std::vector<DetectorStats> run_trials(const Workload& wl, const std::vector<DetectorSpec>& detectors,
                                      const FaultConfig& fault, std::size_t trials, std::uint64_t input_seed,
                                      std::uint64_t fault_seed, const TrialSetup& setup) {
  std::vector<TrialOutcome> outcomes(trials);
  parallel_for(trials, [&](std::size_t t) {
    const auto [w, x] = generate_operands(wl, derive_seed(input_seed, t));
    FaultConfig fc = fault;
    fc.seed = derive_seed(fault_seed, t);
    const SimResult sim = run_array(w, x, setup.flow, fc, setup.stat, setup.array);
    const ChecksumPair cs(sim.predicted, sim.observed);

    TrialOutcome& out = outcomes[t];
    out.critical = error_set_critical(sim.events, setup.quality_region);
    for (const auto& d : detectors) {
      if (d.kind == DetectorKind::statistical) {
        StatUnitConfig unit = setup.stat;
        unit.params = d.params;
        out.verdicts.push_back(statistical_unit(sim.predicted, sim.observed, unit));
      } else {
        out.verdicts.push_back(detect(cs, d));
      }
    }
  });

  std::vector<DetectorStats> stats;
  for (const auto& d : detectors) stats.push_back(DetectorStats{d});
  for (const auto& o : outcomes) {
    for (std::size_t i = 0; i < detectors.size(); ++i) {
      const auto& v = o.verdicts[i];
      auto& s = stats[i];
      ++s.trials;
      if (v.recover()) ++s.recoveries;
      else if (o.critical) ++s.undetected_critical;
      s.freq_eff_sum += v.freq_eff;
      s.msd_sum += static_cast<long double>(v.msd);
    }
  }
  return stats;
}

const SweepSeries* SweepResult::find(DetectorKind k) const {
  for (const auto& s : series)
    if (s.detector.kind == k) return &s;
  return nullptr;
}

SweepResult sweep_voltage(const Workload& wl, const std::vector<DetectorSpec>& detectors,
                          const std::vector<double>& voltages, const EnergyConfig& cfg, std::size_t trials,
                          std::uint64_t seed, const BitWindow& window, const TrialSetup& setup) {
  if (voltages.empty()) throw InvalidInput("voltage sweep is empty");
  if (detectors.empty()) throw InvalidInput("voltage sweep needs at least one detector");
  if (trials == 0) throw InvalidInput("voltage sweep needs at least one trial");
  cfg.validate();
  for (double v : voltages) {
    if (v > cfg.v_nom) throw InvalidInput("sweep voltage " + std::to_string(v) + " exceeds v_nom");
    cfg.table.ber_at(v);  // span check up front
  }

  SweepResult res;
  res.n_mac = static_cast<double>(wl.macs_per_gemm()) * static_cast<double>(wl.gemm_count);
  for (const auto& d : detectors) res.series.push_back(SweepSeries{d, {}, 0});

  const double cycles = static_cast<double>(cycle_count(wl.m, wl.k, wl.n, setup.flow, setup.array));
  const double cycles_bare = static_cast<double>(cycle_count(wl.m, wl.k, wl.n, setup.flow, setup.array, false));

  for (std::size_t vi = 0; vi < voltages.size(); ++vi) {
    const double v = voltages[vi];
    FaultConfig fault;
    fault.mode = FaultMode::ber;
    fault.ber = cfg.table.ber_at(v);
    fault.bit_window = window;
    const auto stats = run_trials(wl, detectors, fault, trials, seed, derive_seed(seed, vi, 1), setup);
    for (std::size_t i = 0; i < detectors.size(); ++i) {
      const DetectorKind kind = detectors[i].kind;
      SweepPoint p;
      p.voltage = v;
      p.ber = fault.ber;
      p.detector = kind;
      p.recovery_rate = kind == DetectorKind::none ? 0.0 : stats[i].recovery_rate();
      p.quality_proxy = stats[i].quality_proxy();
      p.energy_total = total_energy(v, p.recovery_rate, res.n_mac, cfg, kind);
      if (kind == DetectorKind::none) p.latency_factor = 1.0;
      else if (kind == DetectorKind::dmr) p.latency_factor = 1.0 + p.recovery_rate;
      else p.latency_factor = cycles / cycles_bare * (1.0 + p.recovery_rate);
      res.series[i].points.push_back(p);
    }
  }

  // Minimum energy; ties go to the higher voltage.
  for (auto& s : res.series) {
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      const auto& cur = s.points[i];
      const auto& best = s.points[s.optimum];
      if (cur.energy_total < best.energy_total ||
          (cur.energy_total == best.energy_total && cur.voltage > best.voltage))
        s.optimum = i;
    }
  }
  return res;
}

}  // namespace sabft
