#pragma once

// Minimal CSV writer: header row, comma separator, '.' decimal point. Numbers
// below 1e-4 in magnitude come out in scientific notation.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghzchain {

inline std::string format_number(double x) {
  char buf[40];
  // %g switches to exponent form exactly when the exponent is below -4
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), columns_(header.size()) {
    write_cells(header);
  }

  void row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::invalid_argument("csv: row has the wrong number of columns");
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    write_cells(cells);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::invalid_argument("csv: row has the wrong number of columns");
    write_cells(cells);
  }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace ghzchain
