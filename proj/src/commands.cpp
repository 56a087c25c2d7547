#include "sabft/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>

#include "sabft/csv.hpp"
#include "sabft/gemm.hpp"
#include "sabft/rng.hpp"

namespace sabft {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<json>> rows;
};

std::string csv_cell(const json& v) {
  if (v.is_null()) return "NA";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_unsigned()) return csv::integer(v.get<std::uint64_t>());
  if (v.is_number_integer()) return csv::integer(v.get<std::int64_t>());
  if (v.is_number_float()) return csv::real(v.get<double>());
  return v.get<std::string>();
}

// Non-finite reals have no JSON literal; they are written as strings.
json json_cell(const json& v) {
  if (v.is_number_float() && !std::isfinite(v.get<double>())) return csv::real(v.get<double>());
  return v;
}

fs::path prepare_output(const ExperimentConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  std::ofstream out(dir / "config.resolved.json");
  json echo = {{"tool", kToolName}, {"version", kToolVersion}, {"config", to_json(cfg)}};
  out << echo.dump(2) << '\n';
  return dir;
}

void write_table(const ExperimentConfig& cfg, const fs::path& dir, const std::string& stem, const Table& t) {
  for (const auto& format : cfg.formats) {
    std::ofstream out(dir / (stem + "." + format));
    if (!out) throw std::runtime_error("cannot write " + (dir / (stem + "." + format)).string());
    if (format == "csv") {
      for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
      out << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
      }
    } else {
      json arr = json::array();
      for (const auto& row : t.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.header[i]] = json_cell(row[i]);
        arr.push_back(obj);
      }
      out << arr.dump(2) << '\n';
    }
  }
}

void print_table(std::ostream& log, const Table& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) log << (i ? "  " : "") << t.header[i];
  log << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) log << (i ? "  " : "") << csv_cell(row[i]);
    log << '\n';
  }
}

std::string label(DetectorKind k) { return std::string(to_string(k)); }

FaultConfig resolved_fault(const ExperimentConfig& cfg) {
  FaultConfig f = cfg.fault;
  if (cfg.compare_voltage) {
    f.mode = FaultMode::ber;
    f.ber = cfg.energy.table.ber_at(*cfg.compare_voltage);
  }
  return f;
}

}  // namespace

CalibrateOutcome cmd_calibrate(const ExperimentConfig& cfg, std::ostream& log) {
  const auto& cc = cfg.calibrate;
  std::unique_ptr<QualityOracle> oracle;
  if (cc.oracle == "planted") oracle = std::make_unique<PlantedRegionOracle>(cc.planted);
  else oracle = std::make_unique<NormPipelineOracle>(cc.norm);

  const fs::path dir = prepare_output(cfg);
  CalibrateOutcome out{quality_grid(*oracle, cc.mag_axis, cc.freq_axis, cc.epsilon, cc.trials, cfg.workload.seed), {}};

  Table grid{{"freq", "mag_log2", "quality", "acceptable"}, {}};
  for (std::size_t f = 0; f < out.grid.freq_axis.size(); ++f)
    for (std::size_t m = 0; m < out.grid.mag_axis.size(); ++m) {
      const auto& c = out.grid.at(f, m);
      grid.rows.push_back({out.grid.freq_axis[f], out.grid.mag_axis[m], c.quality, c.acceptable});
    }
  write_table(cfg, dir, "grid", grid);

  out.params = fit_critical_region(out.grid);
  ParamsDocument doc{out.params, "calibrate oracle=" + cc.oracle + " seed=" + std::to_string(cfg.workload.seed) +
                                     " trials=" + std::to_string(cc.trials)};
  save_params((dir / "params.json").string(), doc);
  log << "fitted a=" << csv::real(out.params.a) << " b=" << csv::real(out.params.b)
      << " theta_freq=" << out.params.theta_freq << '\n';
  return out;
}

CompareOutcome cmd_compare(const ExperimentConfig& cfg, std::ostream& log) {
  const FaultConfig fault = resolved_fault(cfg);
  const auto seed = cfg.workload.seed;
  CompareOutcome out;
  out.ber = fault.mode == FaultMode::ber ? fault.ber : 0.0;
  out.stats = run_trials(cfg.workload, cfg.detector_specs(), fault, cfg.workload.gemm_count, seed,
                         derive_seed(seed, 0, 1), cfg.trial_setup());

  const fs::path dir = prepare_output(cfg);
  Table t{{"detector", "recovery_rate", "undetected_critical_rate", "mean_freq_eff", "mean_msd", "trials", "ber"}, {}};
  for (const auto& s : out.stats)
    t.rows.push_back({label(s.detector.kind), s.recovery_rate(), s.quality_proxy(), s.mean_freq_eff(), s.mean_msd(),
                      s.trials, fault.mode == FaultMode::ber ? json(fault.ber) : json(nullptr)});
  write_table(cfg, dir, "compare", t);
  print_table(log, t);
  return out;
}

SweepOutcome cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  SweepOutcome out;
  out.sweep = sweep_voltage(cfg.workload, cfg.detector_specs(), cfg.sweep_voltages, cfg.energy, cfg.sweep_trials,
                            cfg.workload.seed, cfg.fault.bit_window, cfg.trial_setup());

  const SweepSeries* classical = out.sweep.find(DetectorKind::classical);
  const double nominal = compute_energy(cfg.energy.v_nom, out.sweep.n_mac, cfg.energy);
  for (const auto& s : out.sweep.series) {
    DetectorSaving d;
    d.detector = s.detector.kind;
    d.optimal_voltage = s.best().voltage;
    d.energy_total = s.best().energy_total;
    if (classical) d.saving_vs_classical = 1.0 - d.energy_total / classical->best().energy_total;
    d.saving_vs_nominal = 1.0 - d.energy_total / nominal;
    out.summary.push_back(d);
  }

  const fs::path dir = prepare_output(cfg);
  Table points{{"voltage", "ber", "recovery_rate", "energy_total", "latency_factor", "quality_proxy", "detector"}, {}};
  for (const auto& s : out.sweep.series)
    for (const auto& p : s.points)
      points.rows.push_back({p.voltage, p.ber, p.recovery_rate, p.energy_total, p.latency_factor, p.quality_proxy,
                             label(p.detector)});
  write_table(cfg, dir, "sweep", points);

  Table summary{{"detector", "optimal_voltage", "energy_total", "saving_vs_classical", "saving_vs_nominal"}, {}};
  for (const auto& d : out.summary)
    summary.rows.push_back({label(d.detector), d.optimal_voltage, d.energy_total,
                            d.saving_vs_classical ? json(*d.saving_vs_classical) : json(nullptr),
                            d.saving_vs_nominal});
  write_table(cfg, dir, "sweep_summary", summary);
  print_table(log, summary);
  return out;
}

SimResult cmd_inject(const ExperimentConfig& cfg, std::ostream& log) {
  const auto seed = cfg.workload.seed;
  const auto [w, x] = generate_operands(cfg.workload, derive_seed(seed, 0));
  FaultConfig fault = resolved_fault(cfg);
  // Same GEMM and fault stream as trial 0 of `compare`.
  fault.seed = derive_seed(derive_seed(seed, 0, 1), 0);
  const TrialSetup setup = cfg.trial_setup();
  SimResult sim = run_array(w, x, setup.flow, fault, setup.stat, setup.array);

  const fs::path dir = prepare_output(cfg);
  auto dump = [&](const char* name, auto const& m) {
    std::ofstream out(dir / name);
    write_matrix(out, m);
  };
  dump("W.txt", w);
  dump("X.txt", x);
  dump("Y_clean.txt", gemm(w, x));
  dump("Y_faulty.txt", sim.output);

  Table events{{"row", "col", "before", "after", "flipped_bits"}, {}};
  for (const auto& e : sim.events) {
    std::string bits;
    for (int b : e.flipped_bits()) bits += (bits.empty() ? "" : " ") + std::to_string(b);
    events.rows.push_back({e.row, e.col, e.before, e.after, bits});
  }
  write_table(cfg, dir, "events", events);

  const ChecksumPair cs(sim.predicted, sim.observed);
  Table sums{{"col", "predicted", "observed", "diff"}, {}};
  for (std::size_t j = 0; j < cs.diff().size(); ++j)
    sums.rows.push_back({j, cs.predicted().data[j], cs.observed().data[j], cs.diff()[j]});
  write_table(cfg, dir, "checksums", sums);

  Table verdicts{{"detector", "decision", "msd", "theta_mag", "freq_eff"}, {}};
  for (const auto& spec : cfg.detector_specs()) {
    DetectionVerdict v;
    if (spec.kind == DetectorKind::statistical) {
      StatUnitConfig unit = setup.stat;
      unit.params = spec.params;
      v = statistical_unit(sim.predicted, sim.observed, unit);
    } else {
      v = detect(cs, spec);
    }
    verdicts.rows.push_back({label(spec.kind), v.recover() ? "recover" : "pass", v.msd, v.theta_mag, v.freq_eff});
  }
  write_table(cfg, dir, "verdicts", verdicts);

  log << sim.events.size() << " error event(s); cycles=" << sim.cycles << '\n';
  print_table(log, verdicts);
  return sim;
}

}  // namespace sabft
