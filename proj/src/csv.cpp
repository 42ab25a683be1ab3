#include "depthseg/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

namespace depthseg {

namespace {

constexpr const char* kModule = "cli";

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::Parse, kModule, "row " + std::to_string(line) + ": " + msg);
}

// Splits one record, reading further physical lines while a quoted field is open.
bool read_record(std::istream& in, std::size_t& line_no, Row& row) {
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  row.line = line_no;
  row.fields.clear();
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i >= line.size()) {
      if (quoted) {
        std::string next;
        if (!std::getline(in, next)) parse_error(row.line, "unterminated quoted field");
        ++line_no;
        field.push_back('\n');
        line = std::move(next);
        i = 0;
        continue;
      }
      break;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      row.fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\r' && i + 1 == line.size()) {
      // CRLF line ending.
    } else {
      field.push_back(c);
    }
    ++i;
  }
  row.fields.push_back(std::move(field));
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

bool is_number(std::string_view text) {
  double v;
  return parse_number(text, v);
}

bool is_blank(const Row& row) { return row.fields.size() == 1 && trim(row.fields[0]).empty(); }

}  // namespace

CsvTable read_csv(std::istream& in) {
  std::vector<Row> rows;
  std::size_t line_no = 0;
  Row row;
  while (read_record(in, line_no, row)) {
    if (!is_blank(row)) rows.push_back(row);
  }
  if (rows.empty()) throw Error(ErrorKind::Parse, kModule, "input contains no rows");

  CsvTable table;
  const auto& probe = rows.size() > 1 ? rows[1] : rows[0];
  table.has_timestamp = probe.fields.size() > 1 && !is_number(probe.fields[0]);
  const std::size_t first_coord = table.has_timestamp ? 1 : 0;
  for (std::size_t j = first_coord; j < rows[0].fields.size(); ++j) {
    if (!is_number(rows[0].fields[j])) table.has_header = true;
  }

  const std::size_t width = rows[0].fields.size();
  if (width <= first_coord) parse_error(rows[0].line, "no coordinate columns");
  const std::size_t d = width - first_coord;
  if (table.has_header) {
    for (std::size_t j = first_coord; j < width; ++j) table.column_names.emplace_back(trim(rows[0].fields[j]));
  }
  const std::size_t first_data = table.has_header ? 1 : 0;
  const std::size_t n = rows.size() - first_data;
  if (n < 2) throw Error(ErrorKind::Parse, kModule, "need at least 2 data rows, found " + std::to_string(n));

  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& rec = rows[r];
    if (rec.fields.size() != width) {
      parse_error(rec.line, "has " + std::to_string(rec.fields.size()) + " columns, expected " + std::to_string(width));
    }
    if (table.has_timestamp) table.timestamps.emplace_back(trim(rec.fields[0]));
    for (std::size_t j = first_coord; j < width; ++j) {
      double v = 0.0;
      if (!parse_number(rec.fields[j], v)) {
        parse_error(rec.line, "column " + std::to_string(j + 1) + " is not a finite number: '" + rec.fields[j] + "'");
      }
      values(static_cast<Eigen::Index>(r - first_data), static_cast<Eigen::Index>(j - first_coord)) = v;
    }
  }
  table.data = DataMatrix(std::move(values));
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, kModule, "cannot open input file '" + path + "'");
  return read_csv(in);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const DataMatrix& data, const std::vector<std::string>& column_names) {
  const auto& m = data.values();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j > 0) out << ',';
    if (static_cast<std::size_t>(j) < column_names.size()) {
      out << column_names[static_cast<std::size_t>(j)];
    } else {
      out << 'x' << (j + 1);
    }
  }
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace depthseg
