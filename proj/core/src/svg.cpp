#include "gpc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gpc {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Axis {
  bool log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double t(double v) const { return log ? std::log10(v) : v; }
  void include(double v) {
    if (!usable(v)) return;
    lo = std::min(lo, t(v));
    hi = std::max(hi, t(v));
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  double frac(double v) const { return (t(v) - lo) / (hi - lo); }
  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::ceil(lo); e <= hi; e += 1.0) out.push_back(std::pow(10.0, e));
      if (out.size() >= 2) return out;
      out.clear();
    }
    const double span = log ? std::pow(10.0, hi) - std::pow(10.0, lo) : hi - lo;
    const double base = log ? std::pow(10.0, lo) : lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(base / step) * step; v <= base + span; v += step) {
      if (usable(v)) out.push_back(v);
    }
    return out;
  }
};

}  // namespace

std::string render_svg(const PlotSpec& plot) {
  Axis ax{plot.logx}, ay{plot.logy};
  for (const auto& s : plot.series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (ax.usable(s.x[k]) && ay.usable(s.y[k])) {
        ax.include(s.x[k]);
        ay.include(s.y[k]);
      }
    }
  }
  ax.finish();
  ay.finish();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + ax.frac(v) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - ay.frac(v)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(plot.title) << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double v : ax.ticks()) {
    const double x = px(v);
    o << "<line x1=\"" << x << "\" y1=\"" << kTop + ph << "\" x2=\"" << x << "\" y2=\"" << kTop + ph + 5
      << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << kTop + ph + 18
      << "\" text-anchor=\"middle\">" << fmt(v) << "</text>\n";
  }
  for (double v : ay.ticks()) {
    const double y = py(v);
    o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
      << "\" stroke=\"black\"/><text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
      << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
    << escape(plot.xlabel) << "</text>\n";
  o << "<text transform=\"translate(16," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(plot.ylabel) << "</text>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const Series& ser = plot.series[s];
    const char* color = kColors[s % std::size(kColors)];
    std::ostringstream pts;
    for (std::size_t k = 0; k < std::min(ser.x.size(), ser.y.size()); ++k) {
      if (!ax.usable(ser.x[k]) || !ay.usable(ser.y[k])) continue;
      pts << px(ser.x[k]) << ',' << py(ser.y[k]) << ' ';
      if (ser.markers) {
        o << "<circle cx=\"" << px(ser.x[k]) << "\" cy=\"" << py(ser.y[k]) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
      }
    }
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
      << pts.str() << "\"/>\n";
    const double ly = kTop + 16 + 16 * s;
    o << "<line x1=\"" << kLeft + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw - 130
      << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\""
      << kLeft + pw - 125 << "\" y=\"" << ly << "\">" << escape(ser.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const std::filesystem::path& path, const PlotSpec& plot) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << render_svg(plot);
}

}  // namespace gpc
