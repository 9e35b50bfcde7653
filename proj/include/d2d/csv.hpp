#pragma once

#include <string>
#include <vector>

namespace d2d::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  void add_row(std::vector<std::string> row);
};

/// Shortest text that parses back to the same double.
std::string format_number(double x);

std::string to_string(const Table& t);
Table parse(const std::string& text);

/// Writes through a temporary file in the same directory, then renames.
void write_file(const std::string& path, const Table& t);
Table read_file(const std::string& path);

}  // namespace d2d::csv
