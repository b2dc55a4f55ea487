#ifndef PLATOON_SVG_PLOT_HPP_
#define PLATOON_SVG_PLOT_HPP_

#include <string>
#include <vector>

#include "platoon/harness.hpp"

namespace platoon::io {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x, y;
  bool dashed = false;
};

struct Panel {
  std::string title;
  std::string y_label;
  std::vector<Series> series;
};

// Fixed-viewport stacked panels with deterministic path data.
std::string render_svg(const std::vector<Panel>& panels,
                       const std::string& x_label);

// The standard three-panel figure: velocity tracking, inter-vehicle distances
// with the fixed gap and tightened bound, applied accelerations.
std::string render_sim_svg(const sim::SimLog& log, double delta);

void write_file(const std::string& path, const std::string& content);

}  // namespace platoon::io

#endif  // PLATOON_SVG_PLOT_HPP_
