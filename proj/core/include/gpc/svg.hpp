#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gpc {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::vector<Series> series;
};

/// Standalone SVG line chart with axes, ticks, and a legend. Points that are
/// non-finite (or nonpositive on a log axis) are skipped.
std::string render_svg(const PlotSpec& plot);
void write_svg(const std::filesystem::path& path, const PlotSpec& plot);

}  // namespace gpc
