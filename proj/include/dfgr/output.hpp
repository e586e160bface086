#pragma once

// Result tables and their CSV form: first row column names, numbers with 17
// significant digits, empty cells for missing values, RFC 4180 quoting.

#include <string>
#include <vector>

namespace dfgr {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  /// Column index by name; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
};

/// Shortest-free, lossless form: %.17g; NaN and infinities become "".
std::string format_number(double v);
std::string format_number(long v);
inline std::string format_number(int v) { return format_number(static_cast<long>(v)); }

std::string to_csv(const Table& t);
Table parse_csv(const std::string& text);
/// Empty cells read as NaN.
double cell_number(const std::string& cell);

}  // namespace dfgr
