#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sabft/commands.hpp"
#include "sabft/config.hpp"

using namespace sabft;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sabft_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_compare(const fs::path& out) {
  return json{
      {"workload", {{"M", 16}, {"K", 16}, {"N", 16}, {"gemm_count", 50}, {"seed", 7}}},
      {"fault", {{"mode", "ber"}, {"ber", 0.005}, {"bit_window", {16, 23}}}},
      {"detector", {{"quality_region", {{"a", 2.0}, {"b", 30.0}, {"theta_freq", 2}}}}},
      {"output", {{"directory", out.string()}}},
  };
}

}  // namespace

TEST_CASE("config: defaults") {
  const auto c = parse_config(json::object());
  CHECK(c.workload.m == 64);
  CHECK(c.workload.k == 64);
  CHECK(c.workload.n == 64);
  CHECK(c.dataflow == Dataflow::weight_stationary);
  CHECK(c.fault.bit_window.lo == 16);
  CHECK(c.fault.bit_window.hi == 31);
  CHECK(c.energy.v_nom == 0.9);
  CHECK(c.energy.detect_overhead == doctest::Approx(0.0179));
  CHECK(c.detector_set.size() == 5);
  CHECK(c.calibrate.mag_axis.size() == 16);
  CHECK(c.calibrate.freq_axis.back() == 4096);
  CHECK(c.formats == std::vector<std::string>{"csv"});
  // Sweep defaults to every table row at or below v_nom.
  CHECK(c.sweep_voltages.size() == 31);
  CHECK(c.sweep_voltages.front() == 0.9);
}

TEST_CASE("config: rejections") {
  CHECK_THROWS_AS(parse_config(json{{"bogus", 1}}), ParseError);
  CHECK_THROWS_AS(parse_config(json{{"workload", {{"MM", 1}}}}), ParseError);
  CHECK_THROWS_AS(parse_config(json{{"workload", {{"M", -1}}}}), ParseError);
  CHECK_THROWS_AS(parse_config(json{{"workload", {{"M", "4"}}}}), ParseError);
  CHECK_THROWS_AS(parse_config(json{{"workload", {{"M", 0}}}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(json{{"workload", {{"K", 65537}}}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(json{{"fault", {{"mode", "laser"}}}}), ParseError);
  CHECK_THROWS_AS(parse_config(json{{"fault", {{"bit_window", {3}}}}}), ParseError);
  CHECK_THROWS_AS(parse_config(json{{"fault", {{"bit_window", {20, 10}}}}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(json{{"fault", {{"ber", 1.5}}}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(json{{"detector", {{"kind", "tmr"}}}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(json{{"detector", {{"params", {{"a", 0.5}, {"b", 1.0}, {"theta_freq", 1}}}}}}),
                  InvalidInput);
  CHECK_THROWS_AS(parse_config(json{{"detector", {{"set", json::array()}}}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(json{{"stat_unit", {{"fixed_point_frac_bits", 17}}}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(json{{"energy", {{"v_nom", 0.0}}}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(json{{"sweep", {{"voltages", {0.8}}, {"range", {0.6, 0.8}}}}}), ParseError);
  CHECK_THROWS_AS(parse_config(json{{"sweep", {{"range", {0.6, 0.8}}}}}), ParseError);
  CHECK_THROWS_AS(parse_config(json{{"sweep", {{"trials", 0}}}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(json{{"calibrate", {{"oracle", "magic"}}}}), ParseError);
  CHECK_THROWS_AS(parse_config(json{{"output", {{"formats", {"xml"}}}}}), ParseError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ParseError);
}

TEST_CASE("config: sweep range expands high to low") {
  const auto c = parse_config(json{{"sweep", {{"range", {0.6, 0.7}}, {"step", 0.05}}}});
  CHECK(c.sweep_voltages == std::vector<double>{0.7, 0.65, 0.6});
}

TEST_CASE("config: epsilon accepts the string inf") {
  const auto c = parse_config(json{{"calibrate", {{"epsilon", "inf"}}}});
  CHECK(std::isinf(c.calibrate.epsilon));
  CHECK(to_json(c)["calibrate"]["epsilon"] == "inf");
}

TEST_CASE("config: relative paths resolve against the config file") {
  const fs::path dir = scratch("relpaths");
  save_params((dir / "p.json").string(), ParamsDocument{{1.5, 30.0, 3}, "test"});
  {
    std::ofstream t(dir / "table.csv");
    t << "voltage,ber\n0.9,1e-12\n0.7,1e-6\n";
  }
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << json{{"detector", {{"params_file", "p.json"}}}, {"energy", {{"table_path", "table.csv"}}}}.dump();
  }
  const auto c = load_config((dir / "cfg.json").string());
  CHECK(c.detector.params.a == 1.5);
  CHECK(c.detector.params.b == 30.0);
  CHECK(c.detector.params.theta_freq == 3);
  CHECK(c.stat_unit.params.b == 30.0);
  CHECK(c.sweep_voltages == std::vector<double>{0.9, 0.7});
  CHECK(fs::path(*c.params_file) == dir / "p.json");
}

TEST_CASE("config: to_json round-trips") {
  const auto c = parse_config(json{{"workload", {{"M", 8}, {"seed", 3}}},
                                   {"array", {{"dataflow", "os"}, {"tiling", false}}},
                                   {"fault", {{"mode", "uniform"}, {"mag", 1024}, {"freq", 3}}},
                                   {"compare", {{"voltage", 0.7}}}});
  const json doc = to_json(c);
  const auto back = parse_config(doc);
  CHECK(to_json(back) == doc);
  CHECK(back.dataflow == Dataflow::output_stationary);
  CHECK(back.compare_voltage == 0.7);
}

TEST_CASE("compare: zero BER never recovers") {
  const fs::path out = scratch("compare_zero");
  json doc = small_compare(out);
  doc["fault"]["ber"] = 0.0;
  std::ostringstream log;
  const auto res = cmd_compare(parse_config(doc), log);
  for (const auto& s : res.stats) {
    CHECK(s.recovery_rate() == 0.0);
    CHECK(s.quality_proxy() == 0.0);
  }
  CHECK(fs::exists(out / "config.resolved.json"));
  CHECK(fs::exists(out / "compare.csv"));
}

TEST_CASE("compare: high BER ordering and snapshot") {
  const fs::path out = scratch("compare_high");
  std::ostringstream log;
  const auto res = cmd_compare(parse_config(small_compare(out)), log);
  REQUIRE(res.stats.size() == 5);
  const auto& none = res.stats[0];
  const auto& classical = res.stats[1];
  const auto& stat = res.stats[3];
  CHECK(classical.recovery_rate() == 1.0);
  CHECK(stat.recovery_rate() < classical.recovery_rate());
  CHECK(none.recovery_rate() == 0.0);
  for (const auto& s : res.stats) CHECK(none.quality_proxy() >= s.quality_proxy());

  // Regression snapshot. Any intended change to the RNG or the fault model
  // needs the file regenerated.
  CHECK(slurp(out / "compare.csv") == slurp(fs::path(SABFT_TEST_DATA) / "compare_golden.csv"));

  const fs::path again = scratch("compare_high_again");
  json doc = small_compare(again);
  cmd_compare(parse_config(doc), log);
  CHECK(slurp(out / "compare.csv") == slurp(again / "compare.csv"));
}

TEST_CASE("compare: json output") {
  const fs::path out = scratch("compare_json");
  json doc = small_compare(out);
  doc["output"]["formats"] = {"csv", "json"};
  std::ostringstream log;
  cmd_compare(parse_config(doc), log);
  const json rows = json::parse(slurp(out / "compare.json"));
  REQUIRE(rows.size() == 5);
  CHECK(rows[1]["detector"] == "classical");
  CHECK(rows[1]["recovery_rate"] == 1.0);
}

TEST_CASE("sweep: single nominal voltage and no detector") {
  const fs::path out = scratch("sweep_nominal");
  json doc = {{"workload", {{"M", 8}, {"K", 8}, {"N", 8}}},
              {"detector", {{"set", {"none"}}}},
              {"sweep", {{"voltages", {0.9}}, {"trials", 10}}},
              {"output", {{"directory", out.string()}}}};
  std::ostringstream log;
  const auto res = cmd_sweep(parse_config(doc), log);
  REQUIRE(res.summary.size() == 1);
  CHECK(res.summary[0].saving_vs_nominal == 0.0);
  CHECK(!res.summary[0].saving_vs_classical);
  CHECK(slurp(out / "sweep_summary.csv").find(",NA,") != std::string::npos);
}

TEST_CASE("sweep: byte-identical reruns") {
  std::string first;
  for (int run = 0; run < 2; ++run) {
    const fs::path out = scratch("sweep_rerun" + std::to_string(run));
    json doc = {{"workload", {{"M", 16}, {"K", 16}, {"N", 16}, {"seed", 11}}},
                {"sweep", {{"voltages", {0.9, 0.7, 0.6}}, {"trials", 20}}},
                {"output", {{"directory", out.string()}}}};
    std::ostringstream log;
    cmd_sweep(parse_config(doc), log);
    const std::string now = slurp(out / "sweep.csv") + slurp(out / "sweep_summary.csv");
    if (run == 0) first = now;
    else CHECK(now == first);
  }
}

TEST_CASE("calibrate: planted region and params round-trip") {
  const fs::path out = scratch("calibrate");
  json doc = {{"calibrate", {{"oracle", "planted"}, {"trials", 1}}}, {"output", {{"directory", out.string()}}}};
  std::ostringstream log;
  const auto res = cmd_calibrate(parse_config(doc), log);
  CHECK(res.params.a == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::abs(res.params.b - 40.0) <= 1.0);
  CHECK(res.params.theta_freq == 4);
  CHECK(fs::exists(out / "grid.csv"));

  // Feeding params.json back gives the same verdicts as the in-memory params.
  const fs::path a = scratch("calibrate_a");
  const fs::path b = scratch("calibrate_b");
  json base = small_compare(a);
  base["detector"]["set"] = {"statistical"};
  base["detector"]["params"] = {{"a", res.params.a}, {"b", res.params.b}, {"theta_freq", res.params.theta_freq}};
  cmd_compare(parse_config(base), log);
  base["output"]["directory"] = b.string();
  base["detector"].erase("params");
  base["detector"]["params_file"] = (out / "params.json").string();
  cmd_compare(parse_config(base), log);
  CHECK(slurp(a / "compare.csv") == slurp(b / "compare.csv"));
}

TEST_CASE("calibrate: infinite tolerance has no boundary") {
  const fs::path out = scratch("calibrate_inf");
  json doc = {{"calibrate", {{"epsilon", "inf"}, {"trials", 1}}}, {"output", {{"directory", out.string()}}}};
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_calibrate(parse_config(doc), log), NoBoundaryError);
}

TEST_CASE("inject: artifacts") {
  const fs::path out = scratch("inject");
  json doc = {{"workload", {{"M", 4}, {"K", 4}, {"N", 4}}},
              {"fault", {{"mode", "uniform"}, {"mag", 1 << 20}, {"freq", 2}}},
              {"output", {{"directory", out.string()}}}};
  std::ostringstream log;
  const auto sim = cmd_inject(parse_config(doc), log);
  CHECK(sim.events.size() == 2);
  for (const char* f : {"W.txt", "X.txt", "Y_clean.txt", "Y_faulty.txt", "events.csv", "checksums.csv",
                        "verdicts.csv", "config.resolved.json"})
    CHECK_MESSAGE(fs::exists(out / f), f);
  const json echo = json::parse(slurp(out / "config.resolved.json"));
  CHECK(echo["config"]["fault"]["freq"] == 2);
}

TEST_CASE("verify: clean run passes, corruption is localized") {
  std::ostringstream log;
  VerifyOptions opts;
  opts.cases = 50;
  for (const auto& r : cmd_verify(opts, log)) CHECK_MESSAGE(r.passed(), r.name);

  for (const auto& name : verify_check_names()) {
    opts.corrupt = name;
    for (const auto& r : cmd_verify(opts, log)) CHECK_MESSAGE(r.passed() == (r.name != name), name << " vs " << r.name);
  }
  opts.corrupt = "nope";
  CHECK_THROWS_AS(cmd_verify(opts, log), InvalidInput);
}
