#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sabft/errors.hpp"
#include "sabft/int128.hpp"

namespace sabft {

// Dense row-major matrix. Element (r, c) lives at data[r * cols + c].
template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw InvalidInput("matrix data length does not match rows x cols");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::span<const T> row(std::size_t r) const noexcept {
    return std::span<const T>(data_).subspan(r * cols_, cols_);
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// INT8 GEMM operand. The scale is carried for bookkeeping only; all
// fault-tolerance arithmetic is done on the integer payload.
class QuantMatrix : public Matrix<std::int8_t> {
 public:
  QuantMatrix() = default;
  QuantMatrix(std::size_t rows, std::size_t cols, double scale = 1.0)
      : Matrix(rows, cols), scale_(check_scale(scale)) {}
  QuantMatrix(std::size_t rows, std::size_t cols, std::vector<std::int8_t> data, double scale = 1.0)
      : Matrix(rows, cols, std::move(data)), scale_(check_scale(scale)) {}

  double scale() const noexcept { return scale_; }

  bool operator==(const QuantMatrix&) const = default;

 private:
  static double check_scale(double s) {
    if (!(s > 0.0)) throw InvalidInput("quantization scale must be positive");
    return s;
  }

  double scale_ = 1.0;
};

// INT32 GEMM result.
using AccumMatrix = Matrix<std::int32_t>;

enum class ChecksumSide {
  row,     // e^T M: one entry per column
  column,  // M e: one entry per row
};

struct ChecksumVector {
  std::vector<std::int64_t> data;
  ChecksumSide side = ChecksumSide::row;

  std::size_t size() const noexcept { return data.size(); }
  bool operator==(const ChecksumVector&) const = default;
};

}  // namespace sabft
