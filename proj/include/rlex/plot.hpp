#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlex {

/// One plotted curve: a mean line with an optional symmetric band.
struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> stddev;  // empty -> no band
};

struct PlotLabels {
  std::string title;
  std::string x_axis;
  std::string y_axis;
};

/// Writes a self-contained SVG: shaded +-1 std bands, mean polylines, axis
/// labels, and one legend text entry per series in input order.
inline void emit_plot(const std::vector<PlotSeries>& series, const PlotLabels& labels, std::ostream& out) {
  if (series.empty()) throw std::invalid_argument("emit_plot: need at least one series");
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.mean.size())
      throw std::invalid_argument("emit_plot: series sizes inconsistent");
    if (!s.stddev.empty() && s.stddev.size() != s.mean.size())
      throw std::invalid_argument("emit_plot: stddev size mismatch");
  }

  const double width = 720.0;
  const double height = 480.0;
  const double ml = 70.0, mr = 150.0, mt = 40.0, mb = 55.0;

  double x_lo = series[0].x.front(), x_hi = series[0].x.front();
  double y_lo = series[0].mean.front(), y_hi = series[0].mean.front();
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double sd = s.stddev.empty() ? 0.0 : s.stddev[i];
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.mean[i] - sd);
      y_hi = std::max(y_hi, s.mean[i] + sd);
    }
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;

  const auto sx = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (width - ml - mr); };
  const auto sy = [&](double y) { return height - mb - (y - y_lo) / (y_hi - y_lo) * (height - mt - mb); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  const int n_colors = 6;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  out << "    <line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
      << height - mb << "\"/>\n";
  out << "    <line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
      << "\"/>\n";
  out << "  </g>\n";
  out << "  <text class=\"title\" x=\"" << width / 2 << "\" y=\"" << mt - 14
      << "\" text-anchor=\"middle\" font-size=\"16\">" << labels.title << "</text>\n";
  out << "  <text class=\"x-label\" x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << labels.x_axis << "</text>\n";
  out << "  <text class=\"y-label\" x=\"18\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " << (mt + height - mb) / 2
      << ")\">" << labels.y_axis << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = palette[si % n_colors];
    // Band polygon exists even at zero height so plot structure is stable.
    std::ostringstream band;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double sd = s.stddev.empty() ? 0.0 : s.stddev[i];
      band << sx(s.x[i]) << ',' << sy(s.mean[i] + sd) << ' ';
    }
    for (std::size_t i = s.x.size(); i-- > 0;) {
      const double sd = s.stddev.empty() ? 0.0 : s.stddev[i];
      band << sx(s.x[i]) << ',' << sy(s.mean[i] - sd) << ' ';
    }
    out << "  <polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\""
        << band.str() << "\"/>\n";
    out << "  <polyline class=\"mean\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) out << sx(s.x[i]) << ',' << sy(s.mean[i]) << ' ';
    out << "\"/>\n";
  }

  out << "  <g class=\"legend\" font-size=\"13\">\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const double ly = mt + 18.0 * static_cast<double>(si);
    out << "    <rect x=\"" << width - mr + 10 << "\" y=\"" << ly << "\" width=\"14\" height=\"4\" fill=\""
        << palette[si % n_colors] << "\"/>\n";
    out << "    <text class=\"legend-entry\" x=\"" << width - mr + 30 << "\" y=\"" << ly + 6 << "\">"
        << series[si].name << "</text>\n";
  }
  out << "  </g>\n";
  out << "</svg>\n";
}

}  // namespace rlex
