#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "sabft/ber_table.hpp"
#include "sabft/fault.hpp"
#include "sabft/gemm.hpp"
#include "support.hpp"

using namespace sabft;

namespace {

FaultConfig ber_cfg(double ber, int lo, int hi) {
  FaultConfig f;
  f.ber = ber;
  f.bit_window = {lo, hi};
  return f;
}

FaultConfig uniform_cfg(std::int32_t mag, std::uint64_t freq) {
  FaultConfig f;
  f.mode = FaultMode::uniform;
  f.mag = mag;
  f.freq = freq;
  return f;
}

AccumMatrix random_accum(SplitMix64& rng, std::size_t r, std::size_t c) {
  AccumMatrix y(r, c);
  for (auto& v : y.data()) v = static_cast<std::int32_t>(static_cast<std::uint32_t>(rng()));
  return y;
}

}  // namespace

TEST_CASE("bit flips: ber 0 and ber 1") {
  SplitMix64 rng(3);
  const auto y = random_accum(rng, 5, 7);
  const auto none = sample_bitflips(y, ber_cfg(0.0, 16, 31), 1);
  CHECK(none.corrupted == y);
  CHECK(none.events.empty());

  const auto all = sample_bitflips(y, ber_cfg(1.0, 30, 30), 1);
  REQUIRE(all.events.size() == y.size());
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j)
      CHECK(all.corrupted(i, j) == static_cast<std::int32_t>(static_cast<std::uint32_t>(y(i, j)) ^ (1U << 30)));
  CHECK(all.events.front().flipped_bits() == std::vector<int>{30});
}

TEST_CASE("bit flips: count follows the binomial law") {
  // 10^4 trials of 64 elements x 16 bits at p = 1e-2.
  const AccumMatrix y(8, 8);
  const auto cfg = ber_cfg(1e-2, 16, 31);
  std::uint64_t flips = 0;
  for (std::uint64_t t = 0; t < 10000; ++t)
    for (const auto& e : sample_bitflips(y, cfg, derive_seed(99, t)).events) flips += e.flipped_bits().size();
  const double n = 10000.0 * 64 * 16, p = 1e-2;
  const double mean = n * p, sigma = std::sqrt(n * p * (1 - p));
  CHECK(std::abs(static_cast<double>(flips) - mean) <= 3 * sigma);
}

TEST_CASE("bit flips: events are row-major, within the window, and replay") {
  SplitMix64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto y = random_accum(rng, test::dim(rng, 12), test::dim(rng, 12));
    const int lo = static_cast<int>(rng.below(32));
    const int hi = lo + static_cast<int>(rng.below(32 - lo));
    const auto cfg = ber_cfg(0.2 * rng.uniform(), lo, hi);
    const auto seed = rng();
    const auto inj = sample_bitflips(y, cfg, seed);
    REQUIRE(sample_bitflips(y, cfg, seed).events == inj.events);
    REQUIRE(replay(y, inj.events) == inj.corrupted);
    for (std::size_t i = 0; i < inj.events.size(); ++i) {
      const auto& e = inj.events[i];
      REQUIRE(e.before != e.after);
      REQUIRE(static_cast<std::uint32_t>(e.after) == (static_cast<std::uint32_t>(e.before) ^ e.flip_mask));
      for (int b : e.flipped_bits()) REQUIRE((lo <= b && b <= hi));
      if (i > 0) {
        const auto& p = inj.events[i - 1];
        REQUIRE(std::pair(p.row, p.col) < std::pair(e.row, e.col));
      }
    }
  }
}

TEST_CASE("bit flips: invalid configs") {
  const AccumMatrix y(2, 2);
  CHECK_THROWS_AS(sample_bitflips(y, ber_cfg(1.5, 0, 3), 1), InvalidInput);
  CHECK_THROWS_AS(sample_bitflips(y, ber_cfg(0.1, 5, 3), 1), InvalidInput);
  CHECK_THROWS_AS(sample_bitflips(y, ber_cfg(0.1, 0, 32), 1), InvalidInput);
  CHECK_THROWS_AS(sample_bitflips(y, uniform_cfg(1, 1), 1), InvalidInput);
}

TEST_CASE("uniform injection examples") {
  const AccumMatrix zero(4, 4);
  const auto three = inject_uniform(zero, uniform_cfg(1 << 20, 3), 7);
  int hit = 0, untouched = 0;
  for (auto v : three.corrupted.data()) {
    if (v == (1 << 20)) ++hit;
    if (v == 0) ++untouched;
  }
  CHECK(hit == 3);
  CHECK(untouched == 13);
  std::int64_t dev = 0;
  for (auto v : checksum(three.corrupted, ChecksumSide::row).data) dev += v;
  CHECK(dev == 3 * (std::int64_t{1} << 20));

  CHECK(inject_uniform(zero, uniform_cfg(5, 0), 7).corrupted == zero);
  CHECK(inject_uniform(zero, uniform_cfg(5, 0), 7).events.empty());

  const auto full = inject_uniform(zero, uniform_cfg(1, 16), 7);
  for (auto v : full.corrupted.data()) CHECK(v == 1);

  CHECK_THROWS_AS(inject_uniform(zero, uniform_cfg(1, 17), 7), InvalidInput);
  CHECK_THROWS_AS(inject_uniform(zero, uniform_cfg(0, 1), 7), InvalidInput);
}

TEST_CASE("uniform injection wraps at 32 bits") {
  const AccumMatrix top(1, 1, {2147483647});
  const auto w = inject_uniform(top, uniform_cfg(1, 1), 0);
  CHECK(w.corrupted(0, 0) == -2147483647 - 1);
  CHECK(w.events.front().error() == -(std::int64_t{1} << 32) + 1);
}

TEST_CASE("property: uniform injection picks distinct positions") {
  SplitMix64 rng(21);
  for (int t = 0; t < 200; ++t) {
    const auto y = random_accum(rng, test::dim(rng, 10), test::dim(rng, 10));
    auto cfg = uniform_cfg(static_cast<std::int32_t>(rng.below(1u << 30)) + 1, 0);
    cfg.distinct_columns = rng.below(2) == 1;
    cfg.signed_mix = rng.below(2) == 1;
    cfg.freq = rng.below((cfg.distinct_columns ? y.cols() : y.size()) + 1);
    const auto seed = rng();
    const auto inj = inject_uniform(y, cfg, seed);
    REQUIRE(inj.events.size() == cfg.freq);
    std::set<std::pair<std::size_t, std::size_t>> pos;
    std::set<std::size_t> cols;
    for (const auto& e : inj.events) {
      pos.emplace(e.row, e.col);
      cols.insert(e.col);
      REQUIRE(e.flip_mask == 0);
      if (cfg.signed_mix)
        REQUIRE((e.error() == cfg.mag || e.error() == -cfg.mag || std::abs(e.error()) == (std::int64_t{1} << 32) - cfg.mag));
    }
    REQUIRE(pos.size() == cfg.freq);
    if (cfg.distinct_columns) REQUIRE(cols.size() == cfg.freq);
    REQUIRE(replay(y, inj.events) == inj.corrupted);
    REQUIRE(inject_uniform(y, cfg, seed).corrupted == inj.corrupted);
  }
}

TEST_CASE("replay rejects a log from a different matrix") {
  const AccumMatrix y(2, 2);
  auto inj = inject_uniform(y, uniform_cfg(3, 2), 1);
  const AccumMatrix other(2, 2, {1, 1, 1, 1});
  CHECK_THROWS_AS(replay(other, inj.events), InvalidInput);
}

TEST_CASE("ber_at") {
  const VoltageBerTable t({{0.9, 0.0}, {0.8, 1e-9}, {0.7, 1e-6}});
  CHECK(t.ber_at(0.9) == 0.0);
  CHECK(t.ber_at(0.7) == 1e-6);
  CHECK(t.ber_at(0.8) == 1e-9);
  CHECK(t.ber_at(0.75) == doctest::Approx(std::pow(10.0, (-9.0 - 6.0) / 2)).epsilon(1e-12));
  CHECK(t.ber_at(0.75) == doctest::Approx(3.16227766e-8).epsilon(1e-8));
  // Between a zero row and 1e-9 the zero acts as 1e-15 in the log domain.
  CHECK(t.ber_at(0.85) == doctest::Approx(1e-12).epsilon(1e-9));
  CHECK_THROWS_AS(t.ber_at(0.95), InvalidInput);
  CHECK_THROWS_AS(t.ber_at(0.65), InvalidInput);
}

TEST_CASE("ber_at is monotone over the default table") {
  const auto t = VoltageBerTable::default_table();
  CHECK(t.rows().size() == 31);
  CHECK(t.max_voltage() == doctest::Approx(0.9));
  CHECK(t.min_voltage() == doctest::Approx(0.6));
  CHECK(t.ber_at(0.9) == doctest::Approx(1e-12));
  CHECK(t.ber_at(0.6) == doctest::Approx(1e-4));
  double prev = 0.0;
  for (int i = 0; i <= 3000; ++i) {
    const double v = 0.9 - 0.3 * i / 3000.0;
    const double b = t.ber_at(std::max(v, t.min_voltage()));
    REQUIRE(b >= prev);
    prev = b;
  }
}

TEST_CASE("voltage table CSV") {
  std::istringstream good("voltage,ber\n0.9,0\n0.8,1e-9\n\n0.7,1e-6\n");
  const auto t = VoltageBerTable::parse_csv(good);
  CHECK(t.rows().size() == 3);
  std::stringstream out;
  t.write_csv(out);
  CHECK(VoltageBerTable::parse_csv(out).rows().size() == 3);

  auto error_line = [](const std::string& text) -> std::string {
    std::istringstream in(text);
    try {
      VoltageBerTable::parse_csv(in);
    } catch (const ParseError& e) {
      return e.what();
    }
    return "no error";
  };
  CHECK(error_line("volt,ber\n0.9,0\n").find("line 1") != std::string::npos);
  CHECK(error_line("voltage,ber\n0.9,0\n0.95,1e-9\n").find("line 3") != std::string::npos);
  CHECK(error_line("voltage,ber\n0.9,1e-3\n0.8,1e-9\n").find("line 3") != std::string::npos);
  CHECK(error_line("voltage,ber\n0.9,abc\n").find("line 2") != std::string::npos);
  CHECK(error_line("voltage,ber\n0.9\n").find("line 2") != std::string::npos);
  CHECK(error_line("voltage,ber\n").find("no rows") != std::string::npos);
  CHECK_THROWS_AS(VoltageBerTable::load_csv("/nonexistent/table.csv"), ParseError);
}
