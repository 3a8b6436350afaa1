#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apguard::csv {

// Shortest fixed-notation decimal that parses back to the same double.
// Never emits exponents or "-0".
std::string format_number(double v);

std::optional<double> try_parse_number(std::string_view s);
// Throws ParseError naming `row` and `column` on a non-numeric cell.
double parse_number(std::string_view s, std::size_t row, std::string_view column);

// Splits one line on commas, trims surrounding blanks and a trailing '\r'.
// Quoting is not supported; none of the accepted layouts use it.
std::vector<std::string> split_line(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based file line number of every data row, for error messages.
  std::vector<std::size_t> line_numbers;

  std::optional<std::size_t> column_index(std::string_view name) const;
};

// Reads a headered CSV; blank lines are skipped, every row must match the
// header width.
Table read_table(std::istream& in);
// Reads a header-less CSV.
Table read_rows(std::istream& in);

}  // namespace apguard::csv
