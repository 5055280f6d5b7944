#include "mars/table.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "mars/errors.hpp"

namespace mars {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one logical record; `line` may be extended by following physical
// lines when a quoted field spans a newline.
std::vector<std::string> split_record(std::istream& in, std::string line, std::size_t& line_no, std::string_view source) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  std::size_t i = 0;
  for (;;) {
    if (i == line.size()) {
      if (!quoted) break;
      std::string next;
      if (!std::getline(in, next))
        throw InputError(std::string(source) + ": line " + std::to_string(line_no) + ": unterminated quoted field");
      ++line_no;
      cur.push_back('\n');
      line = std::move(next);
      i = 0;
      continue;
    }
    const char ch = line[i++];
    if (quoted) {
      if (ch == '"') {
        if (i < line.size() && line[i] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"' && trim(cur).empty()) {
      cur.clear();
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(was_quoted ? cur : std::string(trim(cur)));
  return fields;
}

}  // namespace

std::optional<std::size_t> RawTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

RawTable read_csv(std::istream& in, std::string_view source) {
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_record(in, std::move(line), line_no, source);
    if (!have_header) {
      table.header = std::move(fields);
      for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (table.header[c].empty())
          throw InputError(std::string(source) + ": line " + std::to_string(line_no) + ", column " +
                           std::to_string(c + 1) + ": empty column name");
        for (std::size_t k = 0; k < c; ++k)
          if (table.header[k] == table.header[c])
            throw InputError(std::string(source) + ": duplicate column name '" + table.header[c] + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      throw InputError(std::string(source) + ": line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " fields, found " + std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw InputError(std::string(source) + ": empty input, header row required");
  return table;
}

RawTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_csv(in, path);
}

void write_csv(std::ostream& out, const RawTable& table) {
  auto write_field = [&](const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out << f;
      return;
    }
    out << '"';
    for (char ch : f) {
      if (ch == '"') out << '"';
      out << ch;
    }
    out << '"';
  };
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      write_field(row[i]);
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& r : table.rows) write_row(r);
}

std::string format_number(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return x;
}

}  // namespace mars
