#pragma once

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace exbt::data {

using Date = std::chrono::sys_days;

/// Parses `YYYY-MM-DD`; returns nullopt on any malformed or impossible date.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

/// Shortest representation that parses back to the identical double.
std::string format_double(double v);

/// Parses a numeric cell. Empty, `NaN` and `nan` yield NaN (missing).
/// Returns nullopt when the text is not a number.
std::optional<double> parse_cell(std::string_view text);

/// Minimal RFC-4180 reader: comma separated, optional double-quoted fields,
/// CRLF tolerated.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`; false at end of input.
  bool next(std::vector<std::string>& fields);
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

/// Quotes a field only when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

}  // namespace exbt::data
