#pragma once

#include <string>
#include <vector>

namespace d2d::svg {

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::vector<double> y_low, y_high;  // optional error bars, same length as y
};

struct Plot {
  std::string title, x_label, y_label;
  std::vector<Series> series;
};

/// Line plot with markers, linear axes and an inline legend.
std::string render(const Plot& p, int width = 640, int height = 420);
void write_file(const std::string& path, const Plot& p);

}  // namespace d2d::svg
