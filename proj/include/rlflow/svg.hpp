#pragma once

#include <string>
#include <vector>

namespace rlflow::svg {

struct Interval {
  std::string label;
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Standalone SVG documents with axes and tick labels.
std::string line_plot(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                      const std::string& x_label, const std::string& y_label);

// Horizontal dot-and-whisker plot, one row per interval, with a zero line.
std::string dot_plot(const std::vector<Interval>& rows, const std::string& title);

}  // namespace rlflow::svg
