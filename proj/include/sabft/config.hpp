#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sabft/detectors.hpp"
#include "sabft/energy.hpp"
#include "sabft/fault.hpp"
#include "sabft/resilience.hpp"
#include "sabft/systolic.hpp"
#include "sabft/workload.hpp"

namespace sabft {

inline constexpr const char* kToolName = "sabft";
inline constexpr const char* kToolVersion = "0.1.0";

struct CalibrateConfig {
  std::string oracle = "planted";  // planted | norm
  CriticalRegionParams planted{2.0, 40.0, 4};
  NormOracleConfig norm{};
  std::vector<double> mag_axis;          // log2 magnitudes
  std::vector<std::uint64_t> freq_axis;
  double epsilon = 0.5;
  std::size_t trials = 32;
};

struct ExperimentConfig {
  Workload workload{};
  ArrayConfig array{};
  Dataflow dataflow = Dataflow::weight_stationary;
  FaultConfig fault{};

  DetectorSpec detector{};                   // the selected detector (inject)
  std::optional<std::string> params_file;    // overrides detector.params
  std::vector<DetectorKind> detector_set;    // compared side by side (compare, sweep)
  StatUnitConfig stat_unit{};                // params mirror detector.params
  std::optional<CriticalRegionParams> quality_region;  // defaults to detector.params

  EnergyConfig energy{};
  std::optional<std::string> table_path;

  std::vector<double> sweep_voltages;
  std::size_t sweep_trials = 200;
  std::optional<double> compare_voltage;

  CalibrateConfig calibrate{};

  std::string output_dir = "out";
  std::vector<std::string> formats{"csv"};  // any of csv, json

  // Detector specs for detector_set, all sharing the resolved params.
  std::vector<DetectorSpec> detector_specs() const;
  CriticalRegionParams region() const { return quality_region.value_or(detector.params); }
  TrialSetup trial_setup() const;
};

// Parses a config document. Unknown keys, wrong types and unreadable
// referenced files raise ParseError; out-of-range values raise
// InvalidInput. Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

// Round-trippable JSON echo of a resolved config.
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace sabft
