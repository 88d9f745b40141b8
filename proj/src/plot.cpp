#include "rshare/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rshare::plot {

namespace fs = std::filesystem;

std::vector<Chart> aggregate(const std::vector<harness::MetricRow>& rows,
                             const std::string& metric, std::size_t max_points) {
  if (max_points == 0) throw std::invalid_argument("max_points must be positive");
  std::set<std::string> experiments;
  for (const auto& r : rows) experiments.insert(r.experiment);
  const bool mixed = experiments.size() > 1;

  // metric -> label -> seed -> episode -> value
  std::map<std::string, std::map<std::string, std::map<int, std::map<long, double>>>> grouped;
  for (const auto& r : rows) {
    if (!metric.empty() && r.metric != metric) continue;
    const std::string label = mixed ? r.experiment + "/" + r.agent : r.agent;
    grouped[r.metric][label][r.seed][r.episode] = r.value;
  }
  if (grouped.empty())
    throw std::invalid_argument(metric.empty() ? "no metrics to plot"
                                               : "no rows for metric '" + metric + "'");

  std::string title;
  for (const auto& e : experiments) title += (title.empty() ? "" : ", ") + e;

  std::vector<Chart> charts;
  for (const auto& [name, by_label] : grouped) {
    Chart chart;
    chart.metric = name;
    chart.title = title + ": " + name;
    for (const auto& [label, by_seed] : by_label) {
      std::set<long> episode_set;
      for (const auto& [seed, values] : by_seed)
        for (const auto& [e, v] : values) episode_set.insert(e);
      const std::vector<long> episodes(episode_set.begin(), episode_set.end());
      const std::size_t width = (episodes.size() + max_points - 1) / max_points;

      Series series;
      series.label = label;
      for (std::size_t b = 0; b < episodes.size(); b += width) {
        const std::size_t end = std::min(episodes.size(), b + width);
        std::vector<double> seed_means;
        for (const auto& [seed, values] : by_seed) {
          double sum = 0.0;
          int count = 0;
          for (std::size_t k = b; k < end; ++k) {
            if (auto it = values.find(episodes[k]); it != values.end()) {
              sum += it->second;
              ++count;
            }
          }
          if (count > 0) seed_means.push_back(sum / count);
        }
        if (seed_means.empty()) continue;
        double mean = 0.0;
        for (double v : seed_means) mean += v;
        mean /= static_cast<double>(seed_means.size());
        double var = 0.0;
        for (double v : seed_means) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / static_cast<double>(seed_means.size()));
        Point p;
        p.episode = 0.5 * static_cast<double>(episodes[b] + episodes[end - 1]);
        p.mean = mean;
        p.low = mean - sd;
        p.high = mean + sd;
        p.seeds = static_cast<int>(seed_means.size());
        series.points.push_back(p);
      }
      chart.series.push_back(std::move(series));
    }
    charts.push_back(std::move(chart));
  }
  return charts;
}

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Roughly five round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    step = f * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    out.push_back(t);
  return out;
}

}  // namespace

std::string render_svg(const Chart& chart) {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& s : chart.series) {
    for (const auto& p : s.points) {
      if (first) {
        x0 = x1 = p.episode;
        y0 = p.low;
        y1 = p.high;
        first = false;
      }
      x0 = std::min(x0, p.episode);
      x1 = std::max(x1, p.episode);
      y0 = std::min(y0, p.low);
      y1 = std::max(y1, p.high);
    }
  }
  if (x1 - x0 < 1e-12) x1 = x0 + 1;
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  } else {
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">" << escape(chart.title)
      << "</text>\n";
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (double t : ticks(y0, y1)) {
    svg << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + pw) << "\" y1=\""
        << num(sy(t)) << "\" y2=\"" << num(sy(t)) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(t) + 4)
        << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(x0, x1)) {
    svg << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(kTop + ph + 18)
        << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 10)
      << "\" text-anchor=\"middle\">episode</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const auto& s = chart.series[i];
    const char* color = kColors[i % std::size(kColors)];
    if (s.points.empty()) continue;
    svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (const auto& p : s.points) svg << num(sx(p.episode)) << ',' << num(sy(p.high)) << ' ';
    for (auto it = s.points.rbegin(); it != s.points.rend(); ++it)
      svg << num(sx(it->episode)) << ',' << num(sy(it->low)) << ' ';
    svg << "\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : s.points) svg << num(sx(p.episode)) << ',' << num(sy(p.mean)) << ' ';
    svg << "\"/>\n";
    const double ly = kTop + 14 + 18 * static_cast<double>(i);
    svg << "<line x1=\"" << num(kLeft + pw + 12) << "\" x2=\"" << num(kLeft + pw + 32)
        << "\" y1=\"" << num(ly) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"3\"/>\n";
    svg << "<text x=\"" << num(kLeft + pw + 38) << "\" y=\"" << num(ly + 4) << "\">"
        << escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<fs::path> plot_directory(const fs::path& dir, const std::string& metric) {
  const auto rows = harness::read_metrics(dir / "metrics.csv");
  const auto charts = aggregate(rows, metric);
  const fs::path out_dir = dir / "plots";
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (const auto& chart : charts) {
    std::string stem = chart.metric;
    for (char& c : stem)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
        c = '_';
    const fs::path path = out_dir / (stem + ".svg");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << render_svg(chart);
    written.push_back(path);
  }
  return written;
}

}  // namespace rshare::plot
