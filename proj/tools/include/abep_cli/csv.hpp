#pragma once

#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace abep::cli {

// One CSV cell: text, integer, or a double printed with 17 significant
// digits. An empty optional prints as an empty field.
class Cell {
 public:
  Cell(const char* s) : text_(s) {}
  Cell(std::string s) : text_(std::move(s)) {}
  Cell(int v) : text_(std::to_string(v)) {}
  Cell(long v) : text_(std::to_string(v)) {}
  Cell(unsigned long v) : text_(std::to_string(v)) {}
  Cell(unsigned long long v) : text_(std::to_string(v)) {}
  Cell(double v);
  Cell(std::optional<double> v);

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void row(std::initializer_list<Cell> cells);
  void row(const std::vector<Cell>& cells);

 private:
  std::ostream& os_;
};

}  // namespace abep::cli
