#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscseg::io {

/// Malformed input. `line` and `column` are 1-based; 0 when not applicable.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& source, std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct CsvField {
  std::string text;
  std::size_t column = 0;  // 1-based character column where the field starts
};

struct CsvRecord {
  std::vector<CsvField> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

/// RFC 4180 records: comma separated, optional double quotes with "" escapes,
/// CRLF or LF line ends, quoted fields may span lines. Blank lines are skipped.
std::vector<CsvRecord> parse_csv(std::istream& in, const std::string& source = "<input>");

struct SeriesTable {
  std::vector<std::string> labels;
  std::vector<Eigen::VectorXd> series;
  std::optional<std::vector<long>> index;  // a leading t/time/index/idx column
};

/// Header row first. A leading column named t, time, index or idx (any case)
/// holds strictly increasing integer time stamps; every other column is a series.
SeriesTable read_series(std::istream& in, const std::string& source = "<input>");
SeriesTable read_series_file(const std::string& path);

/// Writes a `t` column (1..T unless `index` is given) followed by one column per
/// series. Values use the shortest round-trip representation.
void write_series(std::ostream& out, const std::vector<std::string>& labels,
                  const std::vector<Eigen::VectorXd>& series,
                  const std::vector<long>* index = nullptr);

std::string format_double(double v);

}  // namespace oscseg::io
