#include "sabft/ber_table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "sabft/errors.hpp"

namespace sabft {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view s, std::size_t line, const char* what) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(std::string("bad ") + what + " value '" + std::string(s) + "'", line);
  return v;
}

}  // namespace

VoltageBerTable::VoltageBerTable(std::vector<BerRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw InvalidInput("voltage/BER table is empty");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (!(r.voltage > 0.0)) throw InvalidInput("table voltages must be positive");
    if (!(r.ber >= 0.0 && r.ber <= 1.0)) throw InvalidInput("table BER values must lie in [0, 1]");
    if (i > 0 && !(r.voltage < rows_[i - 1].voltage))
      throw InvalidInput("table voltages must be strictly descending");
    if (i > 0 && r.ber < rows_[i - 1].ber)
      throw InvalidInput("table BER must not decrease as voltage falls");
  }
}

VoltageBerTable VoltageBerTable::parse_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::vector<BerRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    if (!saw_header) {
      if (body != "voltage,ber") throw ParseError("expected header 'voltage,ber'", line_no);
      saw_header = true;
      continue;
    }
    const auto comma = body.find(',');
    if (comma == std::string_view::npos || body.find(',', comma + 1) != std::string_view::npos)
      throw ParseError("expected two comma-separated fields", line_no);
    BerRow row{parse_real(body.substr(0, comma), line_no, "voltage"),
               parse_real(body.substr(comma + 1), line_no, "ber")};
    if (!(row.voltage > 0.0)) throw ParseError("voltage must be positive", line_no);
    if (row.ber < 0.0 || row.ber > 1.0) throw ParseError("ber must lie in [0, 1]", line_no);
    if (!rows.empty() && !(row.voltage < rows.back().voltage))
      throw ParseError("voltages must be strictly descending", line_no);
    if (!rows.empty() && row.ber < rows.back().ber)
      throw ParseError("ber must be non-decreasing down the table", line_no);
    rows.push_back(row);
  }
  if (!saw_header) throw ParseError("empty table file", line_no);
  if (rows.empty()) throw ParseError("table has a header but no rows", line_no);
  return VoltageBerTable(std::move(rows));
}

VoltageBerTable VoltageBerTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open voltage/BER table '" + path + "'");
  try {
    return parse_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

VoltageBerTable VoltageBerTable::default_table() {
  std::vector<BerRow> rows;
  for (int i = 0; i <= 30; ++i) {
    // Integer millivolts keep the listed voltages exact decimal literals.
    const double v = (900 - 10 * i) / 1000.0;
    rows.push_back({v, std::pow(10.0, -12.0 + 8.0 * i / 30.0)});
  }
  return VoltageBerTable(std::move(rows));
}

double VoltageBerTable::ber_at(double voltage) const {
  if (!(voltage >= min_voltage() && voltage <= max_voltage()))
    throw InvalidInput("voltage " + std::to_string(voltage) + " outside the table span [" +
                       std::to_string(min_voltage()) + ", " + std::to_string(max_voltage()) + "]");
  // Rows descend in voltage; find the first row at or below `voltage`.
  std::size_t hi = 0;
  while (rows_[hi].voltage > voltage) ++hi;
  if (rows_[hi].voltage == voltage) return rows_[hi].ber;
  const BerRow& upper = rows_[hi - 1];
  const BerRow& lower = rows_[hi];
  const double lu = std::log10(std::max(upper.ber, kLogFloor));
  const double ll = std::log10(std::max(lower.ber, kLogFloor));
  const double t = (upper.voltage - voltage) / (upper.voltage - lower.voltage);
  return std::pow(10.0, lu + t * (ll - lu));
}

void VoltageBerTable::write_csv(std::ostream& out) const {
  out << "voltage,ber\n";
  char buf[64];
  for (const auto& r : rows_) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g\n", r.voltage, r.ber);
    out << buf;
  }
}

}  // namespace sabft
