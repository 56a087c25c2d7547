#include "sabft/gemm.hpp"

#include <algorithm>
#include <string>

namespace sabft {
namespace {

template <class T>
ChecksumVector checksum_impl(const Matrix<T>& m, ChecksumSide side) {
  ChecksumVector out;
  out.side = side;
  if (side == ChecksumSide::row) {
    out.data.assign(m.cols(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) out.data[c] += m(r, c);
  } else {
    out.data.assign(m.rows(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) out.data[r] += m(r, c);
  }
  return out;
}

void check_shapes(const QuantMatrix& w, const QuantMatrix& x) {
  if (w.cols() != x.rows())
    throw InvalidInput("gemm: inner dimensions differ (" + std::to_string(w.cols()) + " vs " +
                       std::to_string(x.rows()) + ")");
  if (w.cols() > kMaxInnerDim)
    throw InvalidInput("gemm: inner dimension " + std::to_string(w.cols()) +
                       " exceeds the INT32 accumulation limit");
}

}  // namespace

AccumMatrix gemm(const QuantMatrix& w, const QuantMatrix& x) {
  check_shapes(w, x);
  const std::size_t m = w.rows(), k = w.cols(), n = x.cols();
  AccumMatrix y(m, n);
  std::vector<std::int32_t> acc(n);
  // i-k-j order; integer addition is associative so the result does not
  // depend on the loop order.
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t p = 0; p < k; ++p) {
      const std::int32_t a = w(i, p);
      if (a == 0) continue;
      const auto xrow = x.row(p);
      for (std::size_t j = 0; j < n; ++j) acc[j] += a * static_cast<std::int32_t>(xrow[j]);
    }
    for (std::size_t j = 0; j < n; ++j) y(i, j) = acc[j];
  }
  return y;
}

ChecksumVector checksum(const Matrix<std::int8_t>& m, ChecksumSide side) {
  return checksum_impl(m, side);
}

ChecksumVector checksum(const AccumMatrix& m, ChecksumSide side) { return checksum_impl(m, side); }

ChecksumVector predicted_output_checksum(const QuantMatrix& w, const QuantMatrix& x) {
  check_shapes(w, x);
  const ChecksumVector wsum = checksum(w, ChecksumSide::row);
  ChecksumVector out;
  out.side = ChecksumSide::row;
  out.data.assign(x.cols(), 0);
  for (std::size_t p = 0; p < x.rows(); ++p) {
    const std::int64_t c = wsum.data[p];
    const auto xrow = x.row(p);
    for (std::size_t j = 0; j < x.cols(); ++j) out.data[j] += c * xrow[j];
  }
  return out;
}

}  // namespace sabft
