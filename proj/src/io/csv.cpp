#include "oscseg/io/csv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

namespace oscseg::io {

InputError::InputError(const std::string& source, std::size_t line, std::size_t column,
                       const std::string& what)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : "") +
                         (column > 0 ? ":" + std::to_string(column) : "") + ": " + what),
      line_(line),
      column_(column) {}

std::vector<CsvRecord> parse_csv(std::istream& in, const std::string& source) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<CsvRecord> records;
  CsvRecord rec{{}, 1};
  CsvField field{{}, 1};
  std::size_t line = 1, col = 1;
  bool in_quotes = false, after_quote = false, started = false;

  auto end_field = [&](std::size_t next_column) {
    rec.fields.push_back(std::move(field));
    field = {{}, next_column};
    after_quote = false;
  };
  auto end_record = [&] {
    end_field(1);
    // A line holding nothing at all is blank, not a record with one empty field.
    if (started || rec.fields.size() > 1) records.push_back(std::move(rec));
    rec = {{}, line + 1};
    started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i, ++col) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field.text.push_back('"');
        ++i;
        ++col;
      } else if (c == '"') {
        in_quotes = false;
        after_quote = true;
      } else {
        field.text.push_back(c);
        if (c == '\n') {
          ++line;
          col = 0;
        }
      }
      continue;
    }
    switch (c) {
      case ',':
        started = true;
        end_field(col + 1);
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        throw InputError(source, line, col, "bare carriage return");
      case '\n':
        end_record();
        ++line;
        col = 0;
        break;
      case '"':
        if (!field.text.empty() || after_quote) {
          throw InputError(source, line, col, "unexpected quote inside a field");
        }
        in_quotes = started = true;
        break;
      default:
        if (after_quote) throw InputError(source, line, col, "characters after a closing quote");
        field.text.push_back(c);
        started = true;
    }
  }
  if (in_quotes) throw InputError(source, line, col, "unterminated quoted field");
  if (started || !rec.fields.empty()) end_record();
  return records;
}

namespace {

std::string trim(const std::string& s) {
  auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return b < e ? std::string(b, e) : std::string();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_index_name(const std::string& name) {
  const std::string n = lower(trim(name));
  return n == "t" || n == "time" || n == "index" || n == "idx";
}

}  // namespace

SeriesTable read_series(std::istream& in, const std::string& source) {
  const auto records = parse_csv(in, source);
  if (records.empty()) throw InputError(source, 0, 0, "empty input, expected a header row");
  const CsvRecord& header = records.front();
  const bool has_index = is_index_name(header.fields.front().text);
  const std::size_t first = has_index ? 1 : 0;
  if (header.fields.size() <= first) throw InputError(source, header.line, 1, "no series columns");

  SeriesTable out;
  for (std::size_t k = first; k < header.fields.size(); ++k) {
    std::string label = trim(header.fields[k].text);
    if (label.empty()) throw InputError(source, header.line, header.fields[k].column, "empty column name");
    out.labels.push_back(std::move(label));
  }
  const std::size_t width = header.fields.size();
  const std::size_t n = records.size() - 1;
  if (n == 0) throw InputError(source, header.line, 0, "no data rows");
  std::vector<std::vector<double>> cols(width - first, std::vector<double>(n));
  std::vector<long> index;

  for (std::size_t r = 1; r < records.size(); ++r) {
    const CsvRecord& rec = records[r];
    if (rec.fields.size() != width) {
      throw InputError(source, rec.line, 0,
                       "expected " + std::to_string(width) + " fields, found " +
                           std::to_string(rec.fields.size()));
    }
    for (std::size_t k = 0; k < width; ++k) {
      const std::string text = trim(rec.fields[k].text);
      const std::size_t column = rec.fields[k].column;
      if (text.empty()) throw InputError(source, rec.line, column, "missing value");
      const char* b = text.data();
      const char* e = text.data() + text.size();
      if (has_index && k == 0) {
        long t = 0;
        auto [p, ec] = std::from_chars(b, e, t);
        if (ec != std::errc() || p != e) {
          throw InputError(source, rec.line, column, "time index '" + text + "' is not an integer");
        }
        if (!index.empty() && t <= index.back()) {
          throw InputError(source, rec.line, column, "time index must be strictly increasing");
        }
        index.push_back(t);
        continue;
      }
      double v = 0.0;
      auto [p, ec] = std::from_chars(b + (*b == '+' ? 1 : 0), e, v);
      if (ec != std::errc() || p != e) {
        throw InputError(source, rec.line, column, "'" + text + "' is not a number");
      }
      if (!std::isfinite(v)) throw InputError(source, rec.line, column, "non-finite value '" + text + "'");
      cols[k - first][r - 1] = v;
    }
  }
  for (auto& c : cols) out.series.push_back(Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));
  if (has_index) out.index = std::move(index);
  return out;
}

SeriesTable read_series_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, 0, "cannot open file");
  return read_series(in, path);
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

void write_series(std::ostream& out, const std::vector<std::string>& labels,
                  const std::vector<Eigen::VectorXd>& series, const std::vector<long>* index) {
  if (labels.size() != series.size()) throw std::invalid_argument("write_series: label count != series count");
  const Eigen::Index T = series.empty() ? 0 : series.front().size();
  out << "t";
  for (const auto& l : labels) out << ',' << quote_if_needed(l);
  out << '\n';
  for (Eigen::Index t = 0; t < T; ++t) {
    out << (index ? (*index)[static_cast<std::size_t>(t)] : static_cast<long>(t + 1));
    for (const auto& s : series) out << ',' << format_double(s(t));
    out << '\n';
  }
}

}  // namespace oscseg::io
