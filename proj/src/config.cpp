#include "sabft/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

namespace sabft {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// View of one JSON object that rejects keys outside `allowed`.
class Section {
 public:
  Section(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ParseError(path_ + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
      if (!ok.count(key)) throw ParseError(path_ + ": unknown key '" + key + "'");
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const char* key) const { return j_.at(key); }
  std::string where(const char* key) const { return path_ + "." + key; }

  template <class T>
  void get(const char* key, T& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ParseError("expected a boolean");
      } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
        if (!(v.is_number_integer() && v.get<std::int64_t>() >= 0)) throw ParseError("expected a non-negative integer");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ParseError("expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ParseError("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ParseError("expected a string");
      }
      out = v.get<T>();
    } catch (const ParseError& e) {
      throw ParseError(where(key) + ": " + e.what());
    } catch (const json::exception& e) {
      throw ParseError(where(key) + ": " + e.what());
    }
  }

  template <class T>
  std::optional<T> opt(const char* key) const {
    if (!has(key)) return std::nullopt;
    T v{};
    get(key, v);
    return v;
  }

 private:
  const json& j_;
  std::string path_;
};

CriticalRegionParams parse_params(const json& j, const std::string& path) {
  Section s(j, path, {"a", "b", "theta_freq"});
  CriticalRegionParams p;
  s.get("a", p.a);
  s.get("b", p.b);
  s.get("theta_freq", p.theta_freq);
  p.validate();
  return p;
}

json params_json(const CriticalRegionParams& p) {
  return {{"a", p.a}, {"b", p.b}, {"theta_freq", p.theta_freq}};
}

template <class T>
std::vector<T> parse_list(const Section& s, const char* key) {
  std::vector<T> out;
  const json& v = s.raw(key);
  if (!v.is_array()) throw ParseError(s.where(key) + ": expected an array");
  for (const auto& e : v) {
    if constexpr (std::is_unsigned_v<T>) {
      if (!(e.is_number_integer() && e.get<std::int64_t>() >= 0)) throw ParseError(s.where(key) + ": expected non-negative integers");
    } else if constexpr (std::is_arithmetic_v<T>) {
      if (!e.is_number()) throw ParseError(s.where(key) + ": expected numbers");
    } else {
      if (!e.is_string()) throw ParseError(s.where(key) + ": expected strings");
    }
    out.push_back(e.get<T>());
  }
  return out;
}

std::string resolve(const std::string& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base) / path).lexically_normal().string();
}

std::vector<double> default_mag_axis() {
  // A non-integer step keeps the grid out of phase with integer-slope
  // boundaries, which would otherwise alias into a staircase.
  std::vector<double> v;
  for (int i = 0; i < 16; ++i) v.push_back(12.0 + 0.6 * i);
  return v;
}

std::vector<std::uint64_t> default_freq_axis() {
  return {1, 2, 3, 4, 5, 6, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
}

}  // namespace

std::vector<DetectorSpec> ExperimentConfig::detector_specs() const {
  std::vector<DetectorSpec> out;
  for (auto k : detector_set) out.push_back(DetectorSpec{k, detector.params, detector.msd_threshold});
  return out;
}

TrialSetup ExperimentConfig::trial_setup() const {
  TrialSetup s;
  s.flow = dataflow;
  s.array = array;
  s.stat = stat_unit;
  s.stat.params = detector.params;
  s.quality_region = region();
  return s;
}

ExperimentConfig parse_config(const json& doc, const std::string& base_dir) {
  Section top(doc, "config",
              {"workload", "array", "fault", "detector", "stat_unit", "energy", "sweep", "compare", "calibrate",
               "output"});
  ExperimentConfig c;
  c.detector_set = {DetectorKind::none, DetectorKind::classical, DetectorKind::msd, DetectorKind::statistical,
                    DetectorKind::dmr};

  if (top.has("workload")) {
    Section s(top.raw("workload"), "workload", {"M", "K", "N", "gemm_count", "input_distribution", "seed"});
    s.get("M", c.workload.m);
    s.get("K", c.workload.k);
    s.get("N", c.workload.n);
    s.get("gemm_count", c.workload.gemm_count);
    s.get("seed", c.workload.seed);
    if (auto d = s.opt<std::string>("input_distribution")) c.workload.distribution = parse_input_distribution(*d);
    if (c.workload.m == 0 || c.workload.k == 0 || c.workload.n == 0)
      throw InvalidInput("workload dimensions must be positive");
    if (c.workload.k > (std::size_t{1} << 16)) throw InvalidInput("workload K exceeds 65536");
    if (c.workload.gemm_count == 0) throw InvalidInput("workload gemm_count must be positive");
  }

  if (top.has("array")) {
    Section s(top.raw("array"), "array", {"array_rows", "array_cols", "dataflow", "tiling"});
    s.get("array_rows", c.array.rows);
    s.get("array_cols", c.array.cols);
    s.get("tiling", c.array.tiling);
    if (auto d = s.opt<std::string>("dataflow")) c.dataflow = parse_dataflow(*d);
    if (c.array.rows == 0 || c.array.cols == 0) throw InvalidInput("array dimensions must be positive");
  }

  if (top.has("fault")) {
    Section s(top.raw("fault"), "fault",
              {"mode", "ber", "bit_window", "mag", "freq", "signed_mix", "distinct_columns"});
    if (auto m = s.opt<std::string>("mode")) {
      if (*m == "ber") c.fault.mode = FaultMode::ber;
      else if (*m == "uniform") c.fault.mode = FaultMode::uniform;
      else throw ParseError("fault.mode: expected 'ber' or 'uniform'");
    }
    s.get("ber", c.fault.ber);
    s.get("mag", c.fault.mag);
    s.get("freq", c.fault.freq);
    s.get("signed_mix", c.fault.signed_mix);
    s.get("distinct_columns", c.fault.distinct_columns);
    if (s.has("bit_window")) {
      const auto w = parse_list<std::int64_t>(s, "bit_window");
      if (w.size() != 2) throw ParseError("fault.bit_window: expected [lo, hi]");
      c.fault.bit_window = {static_cast<int>(w[0]), static_cast<int>(w[1])};
    }
    if (c.fault.mode == FaultMode::ber) c.fault.validate(1, 1);
  }

  if (top.has("detector")) {
    Section s(top.raw("detector"), "detector",
              {"kind", "params", "params_file", "msd_threshold", "set", "quality_region"});
    if (auto k = s.opt<std::string>("kind")) c.detector.kind = parse_detector_kind(*k);
    if (s.has("params")) c.detector.params = parse_params(s.raw("params"), "detector.params");
    s.get("msd_threshold", c.detector.msd_threshold);
    if (auto f = s.opt<std::string>("params_file")) {
      c.params_file = resolve(base_dir, *f);
      c.detector.params = load_params(*c.params_file).params;
    }
    if (s.has("set")) {
      c.detector_set.clear();
      for (const auto& label : parse_list<std::string>(s, "set")) c.detector_set.push_back(parse_detector_kind(label));
      if (c.detector_set.empty()) throw InvalidInput("detector.set must not be empty");
    }
    if (s.has("quality_region")) c.quality_region = parse_params(s.raw("quality_region"), "detector.quality_region");
  }

  if (top.has("stat_unit")) {
    Section s(top.raw("stat_unit"), "stat_unit", {"log2_mode", "fixed_point_frac_bits"});
    if (auto m = s.opt<std::string>("log2_mode")) {
      if (*m == "exact") c.stat_unit.log2_mode = Log2Mode::exact;
      else if (*m == "lzc") c.stat_unit.log2_mode = Log2Mode::lzc;
      else throw ParseError("stat_unit.log2_mode: expected 'exact' or 'lzc'");
    }
    s.get("fixed_point_frac_bits", c.stat_unit.fixed_point_frac_bits);
  }
  c.stat_unit.params = c.detector.params;
  c.stat_unit.validate();

  if (top.has("energy")) {
    Section s(top.raw("energy"), "energy", {"v_nom", "e_mac_nom", "detect_overhead", "area_overhead", "table_path"});
    s.get("v_nom", c.energy.v_nom);
    s.get("e_mac_nom", c.energy.e_mac_nom);
    s.get("detect_overhead", c.energy.detect_overhead);
    s.get("area_overhead", c.energy.area_overhead);
    if (auto t = s.opt<std::string>("table_path")) {
      c.table_path = resolve(base_dir, *t);
      c.energy.table = VoltageBerTable::load_csv(*c.table_path);
    }
    c.energy.validate();
  }

  if (top.has("sweep")) {
    Section s(top.raw("sweep"), "sweep", {"voltages", "range", "step", "trials"});
    s.get("trials", c.sweep_trials);
    if (s.has("voltages") && s.has("range")) throw ParseError("sweep: give either voltages or range, not both");
    if (s.has("voltages")) c.sweep_voltages = parse_list<double>(s, "voltages");
    if (s.has("range")) {
      const auto r = parse_list<double>(s, "range");
      double step = 0.0;
      s.get("step", step);
      if (r.size() != 2 || !(r[0] <= r[1])) throw ParseError("sweep.range: expected [low, high]");
      if (!(step > 0.0)) throw ParseError("sweep.step: expected a positive step with sweep.range");
      const auto count = static_cast<long>(std::floor((r[1] - r[0]) / step + 1e-9));
      for (long i = 0; i <= count; ++i) c.sweep_voltages.push_back(std::round((r[1] - i * step) * 1e9) / 1e9);
    } else if (s.has("step")) {
      throw ParseError("sweep.step: only valid together with sweep.range");
    }
    if (c.sweep_trials == 0) throw InvalidInput("sweep.trials must be positive");
  }
  if (c.sweep_voltages.empty() && !(top.has("sweep") && (top.raw("sweep").contains("voltages"))))
    for (const auto& r : c.energy.table.rows())
      if (r.voltage <= c.energy.v_nom) c.sweep_voltages.push_back(r.voltage);

  if (top.has("compare")) {
    Section s(top.raw("compare"), "compare", {"voltage"});
    c.compare_voltage = s.opt<double>("voltage");
  }

  c.calibrate.mag_axis = default_mag_axis();
  c.calibrate.freq_axis = default_freq_axis();
  if (top.has("calibrate")) {
    Section s(top.raw("calibrate"), "calibrate", {"oracle", "planted", "norm", "mag_axis", "freq_axis", "epsilon", "trials"});
    s.get("oracle", c.calibrate.oracle);
    if (c.calibrate.oracle != "planted" && c.calibrate.oracle != "norm")
      throw ParseError("calibrate.oracle: expected 'planted' or 'norm'");
    if (s.has("planted")) c.calibrate.planted = parse_params(s.raw("planted"), "calibrate.planted");
    if (s.has("norm")) {
      Section n(s.raw("norm"), "calibrate.norm", {"hidden", "inner", "tokens", "outlier_channels", "norm_kind", "seed"});
      n.get("hidden", c.calibrate.norm.hidden);
      n.get("inner", c.calibrate.norm.inner);
      n.get("tokens", c.calibrate.norm.tokens);
      n.get("outlier_channels", c.calibrate.norm.outlier_channels);
      n.get("seed", c.calibrate.norm.seed);
      if (auto k = n.opt<std::string>("norm_kind")) c.calibrate.norm.norm_kind = parse_norm_kind(*k);
    }
    if (s.has("mag_axis")) c.calibrate.mag_axis = parse_list<double>(s, "mag_axis");
    if (s.has("freq_axis")) c.calibrate.freq_axis = parse_list<std::uint64_t>(s, "freq_axis");
    if (s.has("epsilon")) {
      // JSON has no infinity literal; accept the string "inf".
      const json& e = s.raw("epsilon");
      if (e.is_string() && e.get<std::string>() == "inf") c.calibrate.epsilon = HUGE_VAL;
      else s.get("epsilon", c.calibrate.epsilon);
    }
    s.get("trials", c.calibrate.trials);
  }

  if (top.has("output")) {
    Section s(top.raw("output"), "output", {"directory", "formats"});
    s.get("directory", c.output_dir);
    if (s.has("formats")) c.formats = parse_list<std::string>(s, "formats");
  }
  for (const auto& f : c.formats)
    if (f != "csv" && f != "json") throw ParseError("output.formats: unknown format '" + f + "'");
  if (c.formats.empty()) throw ParseError("output.formats must not be empty");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_config(doc, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

json to_json(const ExperimentConfig& c) {
  json detectors = json::array();
  for (auto k : c.detector_set) detectors.push_back(std::string(to_string(k)));
  json doc = {
      {"workload",
       {{"M", c.workload.m},
        {"K", c.workload.k},
        {"N", c.workload.n},
        {"gemm_count", c.workload.gemm_count},
        {"input_distribution", std::string(to_string(c.workload.distribution))},
        {"seed", c.workload.seed}}},
      {"array",
       {{"array_rows", c.array.rows},
        {"array_cols", c.array.cols},
        {"dataflow", std::string(to_string(c.dataflow))},
        {"tiling", c.array.tiling}}},
      {"fault",
       {{"mode", c.fault.mode == FaultMode::ber ? "ber" : "uniform"},
        {"ber", c.fault.ber},
        {"bit_window", {c.fault.bit_window.lo, c.fault.bit_window.hi}},
        {"mag", c.fault.mag},
        {"freq", c.fault.freq},
        {"signed_mix", c.fault.signed_mix},
        {"distinct_columns", c.fault.distinct_columns}}},
      {"detector",
       {{"kind", std::string(to_string(c.detector.kind))},
        {"params", params_json(c.detector.params)},
        {"msd_threshold", c.detector.msd_threshold},
        {"set", detectors},
        {"quality_region", params_json(c.region())}}},
      {"stat_unit",
       {{"log2_mode", c.stat_unit.log2_mode == Log2Mode::exact ? "exact" : "lzc"},
        {"fixed_point_frac_bits", c.stat_unit.fixed_point_frac_bits}}},
      {"energy",
       {{"v_nom", c.energy.v_nom},
        {"e_mac_nom", c.energy.e_mac_nom},
        {"detect_overhead", c.energy.detect_overhead},
        {"area_overhead", c.energy.area_overhead}}},
      {"sweep", {{"voltages", c.sweep_voltages}, {"trials", c.sweep_trials}}},
      {"calibrate",
       {{"oracle", c.calibrate.oracle},
        {"planted", params_json(c.calibrate.planted)},
        {"norm",
         {{"hidden", c.calibrate.norm.hidden},
          {"inner", c.calibrate.norm.inner},
          {"tokens", c.calibrate.norm.tokens},
          {"outlier_channels", c.calibrate.norm.outlier_channels},
          {"norm_kind", std::string(to_string(c.calibrate.norm.norm_kind))},
          {"seed", c.calibrate.norm.seed}}},
        {"mag_axis", c.calibrate.mag_axis},
        {"freq_axis", c.calibrate.freq_axis},
        {"trials", c.calibrate.trials}}},
      {"output", {{"directory", c.output_dir}, {"formats", c.formats}}},
  };
  if (std::isinf(c.calibrate.epsilon)) doc["calibrate"]["epsilon"] = "inf";
  else doc["calibrate"]["epsilon"] = c.calibrate.epsilon;
  if (c.params_file) doc["detector"]["params_file"] = *c.params_file;
  if (c.table_path) doc["energy"]["table_path"] = *c.table_path;
  if (c.compare_voltage) doc["compare"] = {{"voltage", *c.compare_voltage}};
  return doc;
}

}  // namespace sabft
