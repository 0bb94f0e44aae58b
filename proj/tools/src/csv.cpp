#include "abep_cli/csv.hpp"

#include <cmath>
#include <cstdio>

namespace abep::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Cell::Cell(double v) : text_(format_double(v)) {}
Cell::Cell(std::optional<double> v) : text_(v ? format_double(*v) : std::string()) {}

void CsvWriter::row(std::initializer_list<Cell> cells) {
  row(std::vector<Cell>(cells));
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) os_ << ',';
    os_ << cells[k].text();
  }
  os_ << '\n';
}

}  // namespace abep::cli
