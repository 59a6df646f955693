#pragma once

// Static SVG scatter plots of 2D and 3D embeddings. The last embedding
// coordinate is the drift axis and is always drawn vertically.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fmds/error.hpp"
#include "fmds/linalg.hpp"

namespace fmds::svg {

struct PlotStyle {
  int width = 640;
  int height = 640;
  double point_radius = 3.0;
  /// Rotation about the drift axis and tilt toward the viewer, in degrees
  /// (3D only).
  double azimuth = 30.0;
  double elevation = 20.0;
  std::string title;
  std::string color_label;
  /// Columns to plot when the embedding has more than 3 dimensions.
  std::vector<Index> columns;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Piecewise-linear blue-green-yellow ramp on [0, 1].
inline std::string ramp(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                                                {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * (stops.size() - 1);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(k);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[k][0] * (1 - f) + stops[k + 1][0] * f)),
                static_cast<int>(std::lround(stops[k][1] * (1 - f) + stops[k + 1][1] * f)),
                static_cast<int>(std::lround(stops[k][2] * (1 - f) + stops[k + 1][2] * f)));
  return buf;
}

}  // namespace detail

/// Screen coordinates (horizontal, vertical-up) of each point. 3D points
/// are rotated by the azimuth about the last axis, then tilted by the
/// elevation, and projected orthographically.
inline Matrix project(const Matrix& x, const PlotStyle& style) {
  Matrix sel = x;
  if (!style.columns.empty()) {
    fmds::detail::require(style.columns.size() == 2 || style.columns.size() == 3, "plot: select 2 or 3 columns");
    sel.resize(x.rows(), static_cast<Index>(style.columns.size()));
    for (std::size_t c = 0; c < style.columns.size(); ++c) {
      fmds::detail::require(style.columns[c] >= 0 && style.columns[c] < x.cols(), "plot: column out of range");
      sel.col(static_cast<Index>(c)) = x.col(style.columns[c]);
    }
  }
  fmds::detail::require(sel.cols() == 2 || sel.cols() == 3,
                        "plot: embedding must be 2D or 3D (select columns for higher dimensions)");
  if (sel.cols() == 2) return sel;
  const double az = style.azimuth * std::numbers::pi / 180.0;
  const double el = style.elevation * std::numbers::pi / 180.0;
  Matrix out(sel.rows(), 2);
  for (Index i = 0; i < sel.rows(); ++i) {
    const double a = std::cos(az) * sel(i, 0) - std::sin(az) * sel(i, 1);
    const double depth = std::sin(az) * sel(i, 0) + std::cos(az) * sel(i, 1);
    out(i, 0) = a;
    out(i, 1) = std::cos(el) * sel(i, 2) - std::sin(el) * depth;
  }
  return out;
}

/// One <circle> per point, colored by `values` when given (min to max
/// mapped onto the ramp), with an arrow labeled ω pointing up the drift axis.
inline std::string scatter_plot(const Matrix& x, const std::optional<Vector>& values, const PlotStyle& style = {}) {
  fmds::detail::require(x.rows() >= 1, "plot: empty embedding");
  fmds::detail::require(x.allFinite(), "plot: non-finite coordinates");
  fmds::detail::require(!values || values->size() == x.rows(), "plot: color values do not match the point count");
  fmds::detail::require(style.width >= 100 && style.height >= 100, "plot: canvas too small");
  const Matrix p = project(x, style);

  const double margin = 48.0;
  const double lo_x = p.col(0).minCoeff(), hi_x = p.col(0).maxCoeff();
  const double lo_y = p.col(1).minCoeff(), hi_y = p.col(1).maxCoeff();
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double scale = std::min(style.width, style.height) - 2.0 * margin;
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  auto sx = [&](double v) { return 0.5 * style.width + (v - cx) / span * scale; };
  auto sy = [&](double v) { return 0.5 * style.height - (v - cy) / span * scale; };

  double vmin = 0.0, vmax = 1.0;
  if (values) {
    vmin = values->minCoeff();
    vmax = values->maxCoeff();
  }

  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) + "\" height=\"" +
       std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
       std::to_string(style.height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!style.title.empty()) {
    s += "<text x=\"" + detail::num(0.5 * style.width) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + detail::escape(style.title) + "</text>\n";
  }
  const double ax = 20.0, ay0 = style.height - margin, ay1 = margin;
  s += "<g class=\"drift-axis\"><line x1=\"" + detail::num(ax) + "\" y1=\"" + detail::num(ay0) + "\" x2=\"" +
       detail::num(ax) + "\" y2=\"" + detail::num(ay1) + "\" stroke=\"black\" stroke-width=\"1.5\"/>";
  s += "<polygon points=\"" + detail::num(ax - 5) + "," + detail::num(ay1 + 10) + " " + detail::num(ax) + "," +
       detail::num(ay1) + " " + detail::num(ax + 5) + "," + detail::num(ay1 + 10) + "\" fill=\"black\"/>";
  s += "<text x=\"" + detail::num(ax) + "\" y=\"" + detail::num(ay1 - 6) +
       "\" text-anchor=\"middle\" font-family=\"serif\" font-size=\"16\">ω</text></g>\n";
  s += "<g class=\"points\">\n";
  for (Index i = 0; i < p.rows(); ++i) {
    const double t = vmax > vmin ? ((*values)(i) - vmin) / (vmax - vmin) : 0.5;
    s += "<circle cx=\"" + detail::num(sx(p(i, 0))) + "\" cy=\"" + detail::num(sy(p(i, 1))) + "\" r=\"" +
         detail::num(style.point_radius) + "\" fill=\"" + (values ? detail::ramp(t) : std::string("#3b528b")) +
         "\"/>\n";
  }
  s += "</g>\n";
  if (values && !style.color_label.empty()) {
    s += "<text x=\"" + detail::num(style.width - 8.0) + "\" y=\"" + detail::num(style.height - 12.0) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">color: " +
         detail::escape(style.color_label) + " [" + detail::num(vmin) + ", " + detail::num(vmax) + "]</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace fmds::svg
