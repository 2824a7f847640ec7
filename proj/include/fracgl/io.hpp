#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracgl {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

struct PlotOptions {
  std::string title;
  std::string x_label = "u";
  std::string y_label;
  int width = 640;
  int height = 420;
  bool log_y = false;
};

// Minimal polyline chart with axes, ticks and a legend.
void write_svg_plot(std::ostream& os, const std::vector<PlotSeries>& series, const PlotOptions& options);

// Creates the directory (and parents) if needed; throws when it cannot be written.
void ensure_writable_directory(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace fracgl
