#pragma once

#include <cstdint>
#include <iosfwd>

#include "sabft/matrix.hpp"

namespace sabft {

// Largest inner dimension for which an INT8 x INT8 dot product cannot
// overflow INT32 (|y| <= 128 * 128 * K < 2^31).
inline constexpr std::size_t kMaxInnerDim = std::size_t{1} << 16;

// Y = W X in exact integer arithmetic. Throws InvalidInput on a dimension
// mismatch or K > kMaxInnerDim.
AccumMatrix gemm(const QuantMatrix& w, const QuantMatrix& x);

ChecksumVector checksum(const Matrix<std::int8_t>& m, ChecksumSide side);
ChecksumVector checksum(const AccumMatrix& m, ChecksumSide side);

// (e^T W) X as a row checksum of length N, without forming Y.
ChecksumVector predicted_output_checksum(const QuantMatrix& w, const QuantMatrix& x);

// Plain-text matrix literal: "rows cols" on the first line, then the
// elements in row-major order separated by whitespace.
QuantMatrix read_quant_matrix(std::istream& in);
AccumMatrix read_accum_matrix(std::istream& in);
void write_matrix(std::ostream& out, const Matrix<std::int8_t>& m);
void write_matrix(std::ostream& out, const AccumMatrix& m);

}  // namespace sabft
