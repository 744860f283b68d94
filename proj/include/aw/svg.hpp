#pragma once

#include <string>
#include <vector>

#include "aw/types.hpp"

namespace aw {

struct PlotSeries {
  std::string label;
  std::vector<Scalar> x;
  std::vector<Scalar> y;
};

/// Static SVG line plot: axes, tick labels, one polyline per series and
/// a small legend.  No external dependencies.
void write_svg_line_plot(const std::string& path, const std::string& title,
                         const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<PlotSeries>& series);

}  // namespace aw
