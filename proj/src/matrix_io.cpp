#include <cctype>
#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "sabft/gemm.hpp"

namespace sabft {
namespace {

// Pulls whitespace-separated integer tokens, remembering which line each
// came from so parse failures can point at it.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  bool next(std::int64_t& value) {
    while (pos_ >= line_.size() || !skip_space()) {
      if (!std::getline(in_, line_)) return false;
      ++line_no_;
      pos_ = 0;
    }
    const std::size_t start = pos_;
    while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    const std::string_view tok(line_.data() + start, pos_ - start);
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError("not an integer: '" + std::string(tok) + "'", line_no_);
    return true;
  }

  // Empty input reports line 1.
  std::size_t line() const noexcept { return line_no_ ? line_no_ : 1; }

 private:
  bool skip_space() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    return pos_ < line_.size();
  }

  std::istream& in_;
  std::string line_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

template <class T>
std::vector<T> read_body(std::istream& in, std::size_t& rows, std::size_t& cols) {
  TokenReader tr(in);
  std::int64_t r = 0, c = 0;
  if (!tr.next(r) || !tr.next(c)) throw ParseError("missing 'rows cols' header", tr.line());
  if (r < 0 || c < 0) throw ParseError("negative matrix dimension", tr.line());
  rows = static_cast<std::size_t>(r);
  cols = static_cast<std::size_t>(c);
  std::vector<T> data;
  data.reserve(rows * cols);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    std::int64_t v = 0;
    if (!tr.next(v))
      throw ParseError("expected " + std::to_string(rows * cols) + " elements, got " +
                           std::to_string(i),
                       tr.line());
    if (v < std::numeric_limits<T>::min() || v > std::numeric_limits<T>::max())
      throw ParseError("element " + std::to_string(v) + " out of range", tr.line());
    data.push_back(static_cast<T>(v));
  }
  std::int64_t extra = 0;
  if (tr.next(extra)) throw ParseError("trailing data after matrix body", tr.line());
  return data;
}

template <class T>
void write_impl(std::ostream& out, const Matrix<T>& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << static_cast<std::int64_t>(m(r, c));
    }
    out << '\n';
  }
}

}  // namespace

QuantMatrix read_quant_matrix(std::istream& in) {
  std::size_t rows = 0, cols = 0;
  auto data = read_body<std::int8_t>(in, rows, cols);
  return QuantMatrix(rows, cols, std::move(data));
}

AccumMatrix read_accum_matrix(std::istream& in) {
  std::size_t rows = 0, cols = 0;
  auto data = read_body<std::int32_t>(in, rows, cols);
  return AccumMatrix(rows, cols, std::move(data));
}

void write_matrix(std::ostream& out, const Matrix<std::int8_t>& m) { write_impl(out, m); }
void write_matrix(std::ostream& out, const AccumMatrix& m) { write_impl(out, m); }

}  // namespace sabft
