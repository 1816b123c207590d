#ifndef DFO_PLOT_HPP
#define DFO_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dfo/core.hpp"
#include "dfo/trace.hpp"

namespace dfo {

struct LabeledTrace {
  std::string label;
  Trace trace;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += ch;
    }
  }
  return out;
}

inline std::string fmt_tick(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

} // namespace detail

/// Renders f_best against evaluations, one polyline per trace, as SVG.
/// The value axis is log10 when every plotted f_best is positive.
inline std::string plot_svg(const std::vector<LabeledTrace>& traces) {
  require(!traces.empty(), "nothing to plot");
  constexpr double W = 800, H = 500, left = 80, right = 200, top = 30, bottom = 60;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  bool log_axis = true;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& lt : traces)
    for (const auto& r : lt.trace)
      if (!(r.f_best > 0.0)) log_axis = false;
  auto yval = [&](double f) { return log_axis ? std::log10(f) : f; };
  for (const auto& lt : traces)
    for (const auto& r : lt.trace) {
      if (!std::isfinite(yval(r.f_best))) continue;
      xmin = std::min(xmin, static_cast<double>(r.evals));
      xmax = std::max(xmax, static_cast<double>(r.evals));
      ymin = std::min(ymin, yval(r.f_best));
      ymax = std::max(ymax, yval(r.f_best));
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;

  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
     << "\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n";
  os << "</g>\n";

  os << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
       << detail::fmt_tick(xv) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
       << (log_axis ? "1e" + detail::fmt_tick(yv) : detail::fmt_tick(yv)) << "</text>\n";
  }
  os << "</g>\n";
  os << "<text class=\"xlabel\" x=\"" << left + pw / 2 << "\" y=\"" << H - 15
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\">function evaluations</text>\n";
  os << "<text class=\"ylabel\" x=\"18\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 18 " << top + ph / 2
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\">"
     << (log_axis ? "best function value (log scale)" : "best function value") << "</text>\n";
  if (log_axis) os << "<!-- y-axis: log10 -->\n";

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const char* color = palette[i % std::size(palette)];
    const auto& tr = traces[i].trace;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : tr)
      if (std::isfinite(yval(r.f_best))) pts.emplace_back(px(static_cast<double>(r.evals)), py(yval(r.f_best)));
    if (pts.size() == 1) {
      os << "<circle class=\"curve\" cx=\"" << pts[0].first << "\" cy=\"" << pts[0].second << "\" r=\"3\" fill=\""
         << color << "\"/>\n";
    } else if (!pts.empty()) {
      os << "<polyline class=\"curve\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : pts) os << x << ',' << y << ' ';
      os << "\"/>\n";
    }
    const double ly = top + 20.0 * static_cast<double>(i) + 10.0;
    os << "<g class=\"legend\"><line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << left + pw + 45
       << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
       << detail::xml_escape(traces[i].label) << "</text></g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void emit_plot(const std::vector<LabeledTrace>& traces, const std::string& path) {
  const std::string svg = plot_svg(traces);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << svg;
  if (!out) throw IoError("write failed: " + path);
}

} // namespace dfo

#endif // DFO_PLOT_HPP
