#pragma once

#include <string>
#include <vector>

namespace kmoc {

// One curve or point cloud. Lengths of x and y must match.
struct Series {
  std::string label;
  std::vector<double> x, y;
  bool points = false;  // scatter instead of a polyline
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
  int width = 720, height = 480;
};

// Self-contained SVG: axes, ticks, legend. No external references.
std::string render_svg(const PlotSpec& spec);
void write_svg(const std::string& path, const PlotSpec& spec);

// Long-format CSV of the same data: series,x,y per row.
void write_csv(const std::string& path, const PlotSpec& spec);

}  // namespace kmoc
