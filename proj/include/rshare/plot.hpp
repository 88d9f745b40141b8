#pragma once

// SVG line charts of metrics.csv: mean across seeds with a +-1 standard
// deviation band, one chart per metric and one line per agent.

#include <filesystem>
#include <string>
#include <vector>

#include "rshare/harness.hpp"

namespace rshare::plot {

struct Point {
  double episode = 0.0;  // bin centre
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
  int seeds = 0;
};

struct Series {
  std::string label;  // agent id, prefixed by the experiment when several are mixed
  std::vector<Point> points;
};

struct Chart {
  std::string title;
  std::string metric;
  std::vector<Series> series;
};

// Episodes are averaged into at most max_points bins per seed before the
// across-seed statistics. An empty metric selects every metric; a selection
// that matches nothing throws std::invalid_argument.
std::vector<Chart> aggregate(const std::vector<harness::MetricRow>& rows,
                             const std::string& metric = "", std::size_t max_points = 400);

std::string render_svg(const Chart& chart);

// Reads dir/metrics.csv and writes dir/plots/<metric>.svg. Throws
// std::runtime_error for a missing or corrupt file.
std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& dir,
                                                  const std::string& metric = "");

}  // namespace rshare::plot
