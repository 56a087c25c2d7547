// sabft: run fault-injection experiments on a simulated ABFT systolic array.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sabft/commands.hpp"
#include "sabft/resilience.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2 };

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

sabft::ExperimentConfig resolve(const GlobalOptions& g) {
  auto cfg = g.config.empty() ? sabft::parse_config(nlohmann::json::object()) : sabft::load_config(g.config);
  if (g.seed) cfg.workload.seed = *g.seed;
  if (g.out) cfg.output_dir = *g.out;
  if (g.format) cfg.formats = {*g.format};
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-injection experiments for checksum-protected INT8 GEMM on a systolic array"};
  app.set_version_flag("--version", std::string(sabft::kToolName) + " " + sabft::kToolVersion);
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Override workload.seed");
  app.add_option("--out", g.out, "Override output.directory");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto* verify = app.add_subcommand("verify", "Run the built-in oracle checks");
  sabft::VerifyOptions vopts;
  verify->add_option("--cases", vopts.cases, "Randomized cases per check")->check(CLI::PositiveNumber);
  std::optional<std::string> corrupt;
  verify->add_option("--corrupt", corrupt, "Break one check on purpose (self-test)")->group("");

  auto* calibrate = app.add_subcommand("calibrate", "Fit critical-region parameters from a quality grid");
  auto* compare = app.add_subcommand("compare", "Compare detectors at one operating point");
  auto* sweep = app.add_subcommand("sweep", "Sweep supply voltage and report energy per detector");
  auto* inject = app.add_subcommand("inject", "Dump one faulty GEMM with checksums and verdicts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; every usage error is a config error.
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (verify->parsed()) {
      vopts.corrupt = corrupt;
      if (g.seed) vopts.seed = *g.seed;
      bool ok = true;
      for (const auto& r : sabft::cmd_verify(vopts, std::cout)) ok = ok && r.passed();
      return ok ? kOk : kFailure;
    }
    const auto cfg = resolve(g);
    if (calibrate->parsed()) {
      try {
        sabft::cmd_calibrate(cfg, std::cout);
      } catch (const sabft::NoBoundaryError& e) {
        std::cerr << "error: " << e.what()
                  << "\nhint: widen calibrate.mag_axis / calibrate.freq_axis so the grid spans both"
                     " acceptable and unacceptable cells\n";
        return kFailure;
      }
    } else if (compare->parsed()) {
      sabft::cmd_compare(cfg, std::cout);
    } else if (sweep->parsed()) {
      sabft::cmd_sweep(cfg, std::cout);
    } else if (inject->parsed()) {
      sabft::cmd_inject(cfg, std::cout);
    }
    return kOk;
  } catch (const sabft::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const sabft::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
