#pragma once

#include "eddm/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eddm::harness {

using Echo = std::vector<std::pair<std::string, std::string>>;

inline std::string fmt(double v, int prec = 10) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  return f;
}

// Config echo as leading '#' lines, then a header row and data rows.
inline void write_csv(const std::filesystem::path& p, const Echo& echo, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  auto f = open_output(p);
  for (const auto& [k, v] : echo) f << "# " << k << " = " << v << '\n';
  for (std::size_t k = 0; k < header.size(); ++k) f << (k ? "," : "") << header[k];
  f << '\n';
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) f << (k ? "," : "") << r[k];
    f << '\n';
  }
  if (!f) throw ConfigError("write failed for '" + p.string() + "'");
}

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_y = false;
  std::optional<double> guide_y;  // horizontal reference line
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char ch : s) {
    switch (ch) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += ch;
    }
  }
  return o;
}

// Comments may not contain "--".
inline std::string comment_safe(std::string s) {
  for (std::size_t k = s.find("--"); k != std::string::npos; k = s.find("--")) s.replace(k, 2, "- -");
  return s;
}

}  // namespace detail

// Self-contained SVG line chart. Output depends only on the inputs.
inline std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series, const Echo& echo) {
  bool any = false;
  for (const auto& s : series) any = any || !s.x.empty();
  if (!any) throw std::invalid_argument("plot needs a non-empty series");
  const double W = 720, H = 460, ml = 80, mr = 170, mt = 40, mb = 60;
  auto ty = [&](double y) { return spec.log_y ? std::log10(std::max(y, 1e-300)) : y; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k]) || (spec.log_y && s.y[k] <= 0)) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, ty(s.y[k]));
      y1 = std::max(y1, ty(s.y[k]));
    }
  if (spec.guide_y) {
    y0 = std::min(y0, ty(*spec.guide_y));
    y1 = std::max(y1, ty(*spec.guide_y));
  }
  if (!std::isfinite(x0)) throw std::invalid_argument("plot has no finite points");
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (ty(y) - y0) / (y1 - y0) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) + "\" viewBox=\"0 0 " +
       fmt(W) + " " + fmt(H) + "\">\n";
  o += "<!-- config\n";
  for (const auto& [k, v] : echo) o += detail::comment_safe(k + " = " + v) + "\n";
  o += "-->\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + fmt(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       detail::xml_escape(spec.title) + "</text>\n";
  o += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(W - ml - mr) + "\" height=\"" +
       fmt(H - mt - mb) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0;
    o += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(H - mb + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(xv, 4) + "</text>\n";
    const double yt = y0 + (y1 - y0) * k / 5.0;
    const double yv = spec.log_y ? std::pow(10.0, yt) : yt;
    o += "<text x=\"" + fmt(ml - 6) + "\" y=\"" + fmt(py(yv) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(yv, 3) + "</text>\n";
    o += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(py(yv)) + "\" x2=\"" + fmt(W - mr) + "\" y2=\"" + fmt(py(yv)) +
         "\" stroke=\"#e0e0e0\"/>\n";
  }
  o += "<text x=\"" + fmt((ml + W - mr) / 2) + "\" y=\"" + fmt(H - 16) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + detail::xml_escape(spec.xlabel) +
       "</text>\n";
  o += "<text x=\"18\" y=\"" + fmt((mt + H - mb) / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" " +
       "font-size=\"13\" transform=\"rotate(-90 18 " + fmt((mt + H - mb) / 2) + ")\">" +
       detail::xml_escape(spec.ylabel + (spec.log_y ? " (log)" : "")) + "</text>\n";
  if (spec.guide_y)
    o += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(py(*spec.guide_y)) + "\" x2=\"" + fmt(W - mr) + "\" y2=\"" +
         fmt(py(*spec.guide_y)) + "\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* col = colors[s % 7];
    std::string pts;
    for (std::size_t k = 0; k < series[s].x.size(); ++k) {
      const double x = series[s].x[k], y = series[s].y[k];
      if (!std::isfinite(x) || !std::isfinite(y) || (spec.log_y && y <= 0)) continue;
      const double yc = std::clamp(py(y), mt, H - mb);
      pts += fmt(px(x), 7) + "," + fmt(yc, 7) + " ";
    }
    o += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
    const double ly = mt + 16 + 18 * s;
    o += "<line x1=\"" + fmt(W - mr + 12) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(W - mr + 36) + "\" y2=\"" + fmt(ly) +
         "\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + fmt(W - mr + 42) + "\" y=\"" + fmt(ly + 4) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
         detail::xml_escape(series[s].name) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

// Writes <base>.svg and, unless the caller already wrote a CSV under the same base name, a twin
// <base>.csv with columns (series, x, y).
inline void emit_plot(const std::filesystem::path& base, const PlotSpec& spec, const std::vector<Series>& series,
                      const Echo& echo, const std::string& xname = "x", const std::string& yname = "y",
                      bool twin = true) {
  const std::string svg = render_svg(spec, series, echo);
  if (twin) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : series)
      for (std::size_t k = 0; k < s.x.size(); ++k) rows.push_back({s.name, fmt(s.x[k], 15), fmt(s.y[k], 15)});
    write_csv(std::filesystem::path(base.string() + ".csv"), echo, {"series", xname, yname}, rows);
  }
  auto f = open_output(std::filesystem::path(base.string() + ".svg"));
  f << svg;
  if (!f) throw ConfigError("write failed for '" + base.string() + ".svg'");
}

}  // namespace eddm::harness
