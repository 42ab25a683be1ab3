#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "depthseg/types.hpp"

namespace depthseg {

struct CsvTable {
  DataMatrix data;
  std::vector<std::string> column_names;  // empty when the file has no header
  std::vector<std::string> timestamps;    // empty when there is no timestamp column
  bool has_header = false;
  bool has_timestamp = false;
};

// Parses RFC-4180 CSV with '.' decimals. The first row is a header when it
// holds non-numeric coordinates; the first column is a timestamp column when
// the first data row starts with a non-numeric field. Throws Error(Parse)
// naming the offending row and column.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

void write_csv(std::ostream& out, const DataMatrix& data, const std::vector<std::string>& column_names = {});

}  // namespace depthseg
