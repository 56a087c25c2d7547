#pragma once

// Generators and naive reference implementations shared by the tests. The
// references deliberately avoid the library's own helpers.

#include <cstdint>
#include <vector>

#include "sabft/matrix.hpp"
#include "sabft/rng.hpp"

namespace sabft::test {

inline QuantMatrix random_quant(SplitMix64& rng, std::size_t rows, std::size_t cols) {
  QuantMatrix m(rows, cols);
  for (auto& v : m.data()) v = static_cast<std::int8_t>(static_cast<int>(rng.below(256)) - 128);
  return m;
}

inline std::size_t dim(SplitMix64& rng, std::size_t max) { return 1 + rng.below(max); }

inline std::vector<std::vector<std::int64_t>> naive_product(const QuantMatrix& w, const QuantMatrix& x) {
  std::vector<std::vector<std::int64_t>> y(w.rows(), std::vector<std::int64_t>(x.cols(), 0));
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j)
      for (std::size_t k = 0; k < w.cols(); ++k) y[i][j] += std::int64_t{w(i, k)} * std::int64_t{x(k, j)};
  return y;
}

template <class M>
std::vector<std::int64_t> naive_column_sums(const M& m) {
  std::vector<std::int64_t> s(m.cols(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s[j] += m(i, j);
  return s;
}

template <class M>
std::vector<std::int64_t> naive_row_sums(const M& m) {
  std::vector<std::int64_t> s(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s[i] += m(i, j);
  return s;
}

// Column differences with a mix of zeros, powers of two and arbitrary
// magnitudes up to 2^45, either sign.
inline std::vector<std::int64_t> random_diff(SplitMix64& rng, std::size_t max_len = 64) {
  std::vector<std::int64_t> d(dim(rng, max_len));
  for (auto& v : d) {
    switch (rng.below(4)) {
      case 0: break;
      case 1: v = std::int64_t{1} << rng.below(46); break;
      default: v = static_cast<std::int64_t>(rng.below(std::uint64_t{1} << rng.below(46)) + 1); break;
    }
    if (rng.below(3) == 0) v = -v;
  }
  return d;
}

}  // namespace sabft::test
