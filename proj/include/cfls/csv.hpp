#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cfls/errors.hpp"
#include "cfls/matrix.hpp"

namespace cfls {

struct Table {
  std::vector<std::string> header;  // empty when the file has no header row
  DenseMatrix data;

  bool has_header() const noexcept { return !header.empty(); }

  // Name of column j (0-based): header entry, or its 1-based index.
  std::string column_name(std::size_t j) const {
    return has_header() ? header[j] : std::to_string(j + 1);
  }

  /// Resolves a column selector: a header name when a header is present,
  /// otherwise (or as a fallback) a 1-based index.
  std::size_t resolve(std::string_view selector) const {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == selector) return j;
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(selector.data(), selector.data() + selector.size(), idx);
    if (ec == std::errc() && ptr == selector.data() + selector.size() && idx >= 1 &&
        idx <= data.cols())
      return idx - 1;
    throw DimensionError("unknown column '" + std::string(selector) + "'");
  }
};

namespace detail {

// Splits one logical record. Quoted fields may contain commas, doubled
// quotes and line breaks, so the reader may pull more physical lines.
inline bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  std::size_t k = 0;
  for (;;) {
    if (k == line.size()) {
      if (quoted) {
        std::string more;
        if (!std::getline(in, more)) throw ParseError(line_no, fields.size() + 1, "unterminated quote");
        ++line_no;
        field += '\n';
        line = std::move(more);
        k = 0;
        continue;
      }
      break;
    }
    const char c = line[k++];
    if (quoted) {
      if (c == '"') {
        if (k < line.size() && line[k] == '"') {
          field += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c != '\r' || k != line.size()) {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return true;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline bool blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

}  // namespace detail

/// Reads a numeric CSV table. Every record must have the same number of
/// fields; every field must be a finite decimal. Errors carry 1-based
/// row/column coordinates.
inline Table read_csv(std::istream& in, bool has_header) {
  Table table;
  std::vector<std::string> fields;
  std::vector<std::vector<double>> columns;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first = true;

  while (detail::read_record(in, fields, line_no)) {
    if (detail::blank(fields)) continue;
    if (first) {
      width = fields.size();
      columns.resize(width);
      first = false;
      if (has_header) {
        for (auto& f : fields) table.header.emplace_back(detail::trim(f));
        continue;
      }
    }
    if (fields.size() != width)
      throw ParseError(line_no, std::min(fields.size(), width) + 1,
                       "expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()));
    for (std::size_t c = 0; c < width; ++c) {
      const std::string_view s = detail::trim(fields[c]);
      if (s.empty()) throw ParseError(line_no, c + 1, "empty field");
      double v = 0.0;
      const char* begin = s.data();
      if (*begin == '+') ++begin;
      auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(line_no, c + 1, "not a number: '" + std::string(s) + "'");
      if (!std::isfinite(v)) throw ParseError(line_no, c + 1, "non-finite value");
      columns[c].push_back(v);
    }
  }
  if (first || columns.empty() || columns.front().empty())
    throw ParseError(line_no + 1, 1, "no data rows");

  table.data = DenseMatrix(columns.front().size(), width);
  for (std::size_t c = 0; c < width; ++c)
    std::copy(columns[c].begin(), columns[c].end(), table.data.col(c).begin());
  return table;
}

inline Table read_csv_file(const std::string& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DimensionError("cannot open '" + path + "'");
  return read_csv(in, has_header);
}

/// Shortest decimal that round-trips to the same double.
inline std::string format_scalar(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string quote_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline void write_csv(std::ostream& out, const DenseMatrix& m,
                      const std::vector<std::string>& header = {}) {
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      out << (c ? "," : "") << quote_field(header[c]);
    out << '\n';
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_scalar(m(r, c));
    out << '\n';
  }
}

}  // namespace cfls
