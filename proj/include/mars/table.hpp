#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mars {

/// Untyped tabular data as read from CSV: a header and rows of text cells.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t n_rows() const noexcept { return rows.size(); }
  std::size_t n_cols() const noexcept { return header.size(); }
  std::optional<std::size_t> column(std::string_view name) const;
};

/// RFC-4180 style CSV: comma separated, optional double quotes, header
/// row required. Throws InputError naming the offending line and column.
RawTable read_csv(std::istream& in, std::string_view source = "<stream>");
RawTable read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const RawTable& table);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_number(double x);
std::optional<double> parse_number(std::string_view text);

}  // namespace mars
