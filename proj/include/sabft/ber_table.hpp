#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sabft {

struct BerRow {
  double voltage = 0.0;
  double ber = 0.0;
};

// Operating voltage -> bit error rate. Rows are kept in strictly
// descending voltage with non-decreasing BER.
class VoltageBerTable {
 public:
  // BER = 0 entries are treated as this value inside the log-domain
  // interpolation.
  static constexpr double kLogFloor = 1e-15;

  explicit VoltageBerTable(std::vector<BerRow> rows);

  // CSV with header "voltage,ber". ParseError carries the offending line.
  static VoltageBerTable parse_csv(std::istream& in);
  static VoltageBerTable load_csv(const std::string& path);

  // 0.90 V down to 0.60 V in 10 mV steps; BER rises log-linearly from
  // 1e-12 to 1e-4 across that span.
  static VoltageBerTable default_table();

  // Exact value at a listed voltage, otherwise linear interpolation of
  // log10(BER) in voltage. Throws InvalidInput outside [min, max] voltage.
  double ber_at(double voltage) const;

  double min_voltage() const noexcept { return rows_.back().voltage; }
  double max_voltage() const noexcept { return rows_.front().voltage; }
  const std::vector<BerRow>& rows() const noexcept { return rows_; }

  void write_csv(std::ostream& out) const;

 private:
  std::vector<BerRow> rows_;
};

}  // namespace sabft
