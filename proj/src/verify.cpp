#include <cstdio>
#include <functional>
#include <ostream>

#include "sabft/commands.hpp"
#include "sabft/gemm.hpp"
#include "sabft/rng.hpp"

namespace sabft {
namespace {

QuantMatrix random_quant(SplitMix64& rng, std::size_t rows, std::size_t cols) {
  QuantMatrix m(rows, cols);
  for (auto& v : m.data()) v = static_cast<std::int8_t>(static_cast<int>(rng.below(256)) - 128);
  return m;
}

std::vector<std::int64_t> random_diff(SplitMix64& rng) {
  std::vector<std::int64_t> d(1 + rng.below(64));
  for (auto& v : d) {
    if (rng.below(2)) continue;
    const std::int64_t mag = (std::int64_t{1} << rng.below(41)) + static_cast<std::int64_t>(rng.below(1024));
    v = rng.below(4) == 0 ? -mag : mag;
  }
  return d;
}

CriticalRegionParams random_params(SplitMix64& rng) {
  return {1.0 + 0.01 + 3.0 * rng.uniform(), 64.0 * rng.uniform(), rng.below(9)};
}

struct Check {
  const char* name;
  // Returns true when case `i` holds. `corrupt` breaks the implementation side.
  std::function<bool(SplitMix64&, bool corrupt)> run;
};

std::vector<Check> checks() {
  return {
      {"checksum_identity",
       [](SplitMix64& rng, bool corrupt) {
         const auto w = random_quant(rng, 1 + rng.below(32), 1 + rng.below(32));
         const auto x = random_quant(rng, w.cols(), 1 + rng.below(32));
         auto predicted = predicted_output_checksum(w, x);
         if (corrupt) predicted.data[0] += 1;
         return checksum(gemm(w, x), ChecksumSide::row) == predicted;
       }},
      {"scalar_identity",
       [](SplitMix64& rng, bool corrupt) {
         const auto w = random_quant(rng, 1 + rng.below(32), 1 + rng.below(32));
         const auto x = random_quant(rng, w.cols(), 1 + rng.below(32));
         std::int64_t total = 0;
         for (auto v : predicted_output_checksum(w, x).data) total += v;
         if (corrupt) total += 1;
         const auto wr = checksum(w, ChecksumSide::row), xc = checksum(x, ChecksumSide::column);
         std::int64_t dot = 0;
         for (std::size_t k = 0; k < wr.size(); ++k) dot += wr.data[k] * xc.data[k];
         return total == dot;
       }},
      {"gemm_vs_naive",
       [](SplitMix64& rng, bool corrupt) {
         const auto w = random_quant(rng, 1 + rng.below(24), 1 + rng.below(24));
         const auto x = random_quant(rng, w.cols(), 1 + rng.below(24));
         auto y = gemm(w, x);
         if (corrupt) y(0, 0) ^= 1;
         for (std::size_t i = 0; i < w.rows(); ++i)
           for (std::size_t j = 0; j < x.cols(); ++j) {
             std::int64_t s = 0;
             for (std::size_t k = 0; k < w.cols(); ++k) s += std::int64_t{w(i, k)} * x(k, j);
             if (s != y(i, j)) return false;
           }
         return true;
       }},
      {"dataflow_equivalence",
       [](SplitMix64& rng, bool corrupt) {
         const auto w = random_quant(rng, 1 + rng.below(24), 1 + rng.below(24));
         const auto x = random_quant(rng, w.cols(), 1 + rng.below(24));
         FaultConfig f;
         f.ber = 1e-2 * rng.uniform();
         f.seed = rng();
         StatUnitConfig stat;
         stat.params = random_params(rng);
         ArrayConfig arr{1 + rng.below(16), 1 + rng.below(16), true};
         const auto ws = run_array(w, x, Dataflow::weight_stationary, f, stat, arr);
         auto os = run_array(w, x, Dataflow::output_stationary, f, stat, arr);
         if (corrupt) os.observed.data[0] += 1;
         return ws.output == os.output && ws.predicted == os.predicted && ws.observed == os.observed &&
                ws.verdict == os.verdict && ws.events == os.events;
       }},
      {"detector_cross_check",
       [](SplitMix64& rng, bool corrupt) {
         const auto cs = ChecksumPair::from_diff(random_diff(rng));
         StatUnitConfig stat;
         stat.params = random_params(rng);
         auto hw = statistical_unit(cs.predicted(), cs.observed(), stat);
         if (corrupt) hw.decision = hw.recover() ? Decision::pass : Decision::recover;
         return hw.decision == detect_statistical(cs, stat.params).decision;
       }},
      {"conservativeness",
       [](SplitMix64& rng, bool corrupt) {
         const auto cs = ChecksumPair::from_diff(random_diff(rng));
         const bool stat = detect_statistical(cs, random_params(rng)).recover();
         const bool classical = !corrupt && detect_classical(cs).recover();
         return !stat || classical;
       }},
      {"msd_equals_freq_mag",
       [](SplitMix64& rng, bool corrupt) {
         const auto w = random_quant(rng, 8, 8);
         const auto x = random_quant(rng, 8, 16);
         FaultConfig f;
         f.mode = FaultMode::uniform;
         f.mag = std::int32_t{1} << rng.below(24);
         f.freq = 1 + rng.below(16);
         f.distinct_columns = rng.below(2) == 1;
         const auto clean = gemm(w, x);
         const auto inj = inject_uniform(clean, f, rng());
         auto observed = checksum(inj.corrupted, ChecksumSide::row);
         if (corrupt) observed.data[0] += 1;
         const ChecksumPair cs(predicted_output_checksum(w, x), observed);
         return matrix_sum_deviation(cs.diff()) == f.freq * static_cast<std::uint64_t>(f.mag);
       }},
      {"event_replay",
       [](SplitMix64& rng, bool corrupt) {
         const auto w = random_quant(rng, 1 + rng.below(16), 1 + rng.below(16));
         const auto x = random_quant(rng, w.cols(), 1 + rng.below(16));
         const auto clean = gemm(w, x);
         FaultConfig f;
         f.ber = 0.05 * rng.uniform();
         f.bit_window = {0, 31};
         auto inj = sample_bitflips(clean, f, rng());
         if (corrupt) inj.corrupted(0, 0) ^= 1;
         return replay(clean, inj.events) == inj.corrupted;
       }},
      {"lzc_band",
       [](SplitMix64& rng, bool corrupt) {
         const auto cs = ChecksumPair::from_diff(random_diff(rng));
         StatUnitConfig exact;
         exact.params = random_params(rng);
         StatUnitConfig lzc = exact;
         lzc.log2_mode = Log2Mode::lzc;
         const auto a = statistical_unit(cs.predicted(), cs.observed(), exact);
         auto b = statistical_unit(cs.predicted(), cs.observed(), lzc);
         if (corrupt) b.decision = a.recover() ? Decision::pass : Decision::recover;
         return a.decision == b.decision || (!corrupt && lzc_ambiguous(cs.diff(), exact));
       }},
  };
}

}  // namespace

std::vector<std::string> verify_check_names() {
  std::vector<std::string> names;
  for (const auto& c : checks()) names.emplace_back(c.name);
  return names;
}

std::vector<CheckResult> cmd_verify(const VerifyOptions& opts, std::ostream& log) {
  const auto all = checks();
  if (opts.corrupt) {
    bool known = false;
    for (const auto& c : all) known = known || *opts.corrupt == c.name;
    if (!known) throw InvalidInput("--corrupt: unknown check '" + *opts.corrupt + "'");
  }
  std::vector<CheckResult> results;
  for (std::size_t ci = 0; ci < all.size(); ++ci) {
    const auto& c = all[ci];
    SplitMix64 rng(derive_seed(opts.seed, ci));
    CheckResult r{c.name, opts.cases, 0};
    const bool corrupt = opts.corrupt && *opts.corrupt == c.name;
    for (std::size_t i = 0; i < opts.cases; ++i)
      if (!c.run(rng, corrupt)) ++r.failures;
    char line[128];
    std::snprintf(line, sizeof line, "%-22s %8zu cases  %s", c.name, r.cases, r.passed() ? "PASS" : "FAIL");
    log << line;
    if (!r.passed()) log << " (" << r.failures << " failing)";
    log << '\n';
    results.push_back(r);
  }
  return results;
}

}  // namespace sabft
