#include "kmoc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kmoc/types.hpp"

namespace kmoc {

namespace {

const char* kPalette[] = {"#1f6fb2", "#d9541e", "#3a9e4e", "#8a3fb5", "#b0872a", "#4f4f4f"};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(5);
  s << v;
  return s.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

struct Range {
  double lo = 0.0, hi = 1.0;

  void grow(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

// Round tick positions: step is 1, 2, or 5 times a power of ten.
std::vector<double> ticks(double lo, double hi, int want = 6) {
  std::vector<double> out;
  double span = hi - lo;
  if (span <= 0) return {lo};
  double raw = span / want;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + step * 1e-9; t += step) out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  return out;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  const int W = spec.width, H = spec.height;
  const int ml = 64, mr = 16, mt = spec.title.empty() ? 16 : 40, mb = 48;
  const double pw = W - ml - mr, ph = H - mt - mb;

  bool first = true;
  Range rx, ry;
  for (const Series& s : spec.series)
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (first) {
        rx = {s.x[i], s.x[i]};
        ry = {s.y[i], s.y[i]};
        first = false;
      } else {
        rx.grow(s.x[i]);
        ry.grow(s.y[i]);
      }
    }
  if (rx.hi - rx.lo <= 0) {
    rx.lo -= 0.5;
    rx.hi += 0.5;
  }
  if (ry.hi - ry.lo <= 0) {
    ry.lo -= 0.5;
    ry.hi += 0.5;
  }
  auto X = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto Y = [&](double v) { return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">\n";
  if (!spec.title.empty())
    svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(spec.title) << "</text>\n";

  for (double t : ticks(rx.lo, rx.hi)) {
    double x = X(t);
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << mt << "\" x2=\"" << fmt(x) << "\" y2=\""
        << mt + ph << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << mt + ph + 18 << "\" text-anchor=\"middle\">"
        << fmt(t) << "</text>\n";
  }
  for (double t : ticks(ry.lo, ry.hi)) {
    double y = Y(t);
    svg << "<line x1=\"" << ml << "\" y1=\"" << fmt(y) << "\" x2=\"" << ml + pw << "\" y2=\""
        << fmt(y) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">" << fmt(t)
        << "</text>\n";
  }
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << fmt(pw) << "\" height=\""
      << fmt(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  if (!spec.xlabel.empty())
    svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
        << escape(spec.xlabel) << "</text>\n";
  if (!spec.ylabel.empty())
    svg << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << mt + ph / 2 << ")\">" << escape(spec.ylabel) << "</text>\n";

  for (size_t si = 0; si < spec.series.size(); ++si) {
    const Series& s = spec.series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    size_t m = std::min(s.x.size(), s.y.size());
    if (s.points) {
      for (size_t i = 0; i < m; ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        svg << "<circle cx=\"" << fmt(X(s.x[i])) << "\" cy=\"" << fmt(Y(s.y[i]))
            << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      }
    } else {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
      for (size_t i = 0; i < m; ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        svg << fmt(X(s.x[i])) << "," << fmt(Y(s.y[i])) << " ";
      }
      svg << "\"/>\n";
    }
  }

  double ly = mt + 14;
  for (size_t si = 0; si < spec.series.size(); ++si) {
    if (spec.series[si].label.empty()) continue;
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<rect x=\"" << ml + pw - 150 << "\" y=\"" << fmt(ly - 9) << "\" width=\"12\" height=\"12\" fill=\""
        << color << "\"/>\n";
    svg << "<text x=\"" << ml + pw - 132 << "\" y=\"" << fmt(ly + 2) << "\">"
        << escape(spec.series[si].label) << "</text>\n";
    ly += 18;
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void write_svg(const std::string& path, const PlotSpec& spec) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f << render_svg(spec);
  f.flush();
  if (!f.good()) throw IoError(path + ": write failed");
}

void write_csv(const std::string& path, const PlotSpec& spec) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f << "series,x,y\n";
  f.precision(17);
  for (const Series& s : spec.series) {
    size_t m = std::min(s.x.size(), s.y.size());
    for (size_t i = 0; i < m; ++i) f << s.label << "," << s.x[i] << "," << s.y[i] << "\n";
  }
  f.flush();
  if (!f.good()) throw IoError(path + ": write failed");
}

}  // namespace kmoc
