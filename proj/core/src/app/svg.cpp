#include "risiort/app/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "risiort/error.hpp"

namespace risiort::app {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo <= 0.0) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

void frame(std::ostringstream& o, const std::string& title, const std::string& xl,
           const std::string& yl, const Range& xr, const Range& yr, bool x_ticks) {
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(title) << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << num(pw) << "\" height=\""
    << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    const double y = yr.map(yv, kTop + ph, kTop);
    o << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft << "\" y2=\""
      << num(y) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
      << tick(yv) << "</text>\n";
    if (x_ticks) {
      const double xv = xr.lo + (xr.hi - xr.lo) * i / 4.0;
      const double x = xr.map(xv, kLeft, kLeft + pw);
      o << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(kTop + ph + 4) << "\" stroke=\"black\"/>";
      o << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 18)
        << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
    }
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << kHeight - 14
    << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
  o << "<text x=\"18\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << num(kTop + ph / 2) << ")\">" << escape(yl) << "</text>\n";
}

}  // namespace

std::string line_plot_svg(const PlotSpec& spec) {
  Range xr;
  Range yr;
  for (const auto& s : spec.series) {
    require(s.x.size() == s.y.size(), "line_plot_svg: x and y lengths differ");
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.settle();
  yr.settle();
  std::ostringstream o;
  frame(o, spec.title, spec.x_label, spec.y_label, xr, yr, true);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const auto& s = spec.series[i];
    const char* color = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
    if (s.markers_only) {
      for (std::size_t j = 0; j < s.x.size(); ++j) {
        if (!std::isfinite(s.x[j]) || !std::isfinite(s.y[j])) continue;
        o << "<circle cx=\"" << num(xr.map(s.x[j], kLeft, kLeft + pw)) << "\" cy=\""
          << num(yr.map(s.y[j], kTop + ph, kTop)) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
      }
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t j = 0; j < s.x.size(); ++j) {
        if (!std::isfinite(s.x[j]) || !std::isfinite(s.y[j])) continue;
        o << num(xr.map(s.x[j], kLeft, kLeft + pw)) << ',' << num(yr.map(s.y[j], kTop + ph, kTop))
          << ' ';
      }
      o << "\"/>\n";
    }
    const double ly = kTop + 16.0 + 18.0 * static_cast<double>(i);
    o << "<rect x=\"" << num(kWidth - kRight + 12) << "\" y=\"" << num(ly - 9) << "\" width=\"12\" height=\"12\" fill=\""
      << color << "\"/><text x=\"" << num(kWidth - kRight + 30) << "\" y=\"" << num(ly + 1) << "\">"
      << escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                          const std::vector<Bar>& bars) {
  Range yr;
  yr.add(0.0);
  for (const auto& b : bars) yr.add(b.value);
  yr.settle();
  std::ostringstream o;
  frame(o, title, "", y_label, Range{0.0, 1.0}, yr, false);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const double slot = bars.empty() ? pw : pw / static_cast<double>(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double x = kLeft + slot * (static_cast<double>(i) + 0.15);
    const double y0 = yr.map(0.0, kTop + ph, kTop);
    const double y1 = yr.map(std::isfinite(bars[i].value) ? bars[i].value : 0.0, kTop + ph, kTop);
    o << "<rect x=\"" << num(x) << "\" y=\"" << num(std::min(y0, y1)) << "\" width=\""
      << num(slot * 0.7) << "\" height=\"" << num(std::abs(y1 - y0)) << "\" fill=\""
      << kPalette[i % (sizeof kPalette / sizeof *kPalette)] << "\"/>\n";
    o << "<text x=\"" << num(x + slot * 0.35) << "\" y=\"" << num(kTop + ph + 18)
      << "\" text-anchor=\"middle\">" << escape(bars[i].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  if (std::filesystem::exists(path)) throw ConfigError(path + ": refusing to overwrite an existing file");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << text;
  if (!out) throw ConfigError(path + ": write failed");
}

}  // namespace risiort::app
