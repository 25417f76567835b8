#pragma once

#include <string>
#include <vector>

namespace risiort::app {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers_only = false;  // scatter instead of a polyline
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

std::string line_plot_svg(const PlotSpec& spec);

struct Bar {
  std::string label;
  double value = 0.0;
};

std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                          const std::vector<Bar>& bars);

// Refuses to replace an existing file.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace risiort::app
