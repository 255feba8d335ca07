#include "fastlim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace fastlim {

namespace {

constexpr int kW = 720, kH = 540;
constexpr int kLeft = 72, kRight = 24, kTop = 28, kBottom = 56;

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct LogAxis {
  double lo = 0, hi = 1; // in log10
  double to_px(double log10v, double px_lo, double px_hi) const {
    return px_lo + (log10v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

void open_svg(std::ostringstream& out) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH
      << "\" fill=\"white\"/>\n";
}

void line(std::ostringstream& out, double x1, double y1, double x2, double y2,
          const std::string& style) {
  out << "<line x1=\"" << px(x1) << "\" y1=\"" << px(y1) << "\" x2=\"" << px(x2)
      << "\" y2=\"" << px(y2) << "\" " << style << "/>\n";
}

void text(std::ostringstream& out, double x, double y, const std::string& s,
          const std::string& extra = "") {
  out << "<text x=\"" << px(x) << "\" y=\"" << px(y)
      << "\" font-family=\"monospace\" font-size=\"12\" " << extra << ">" << s
      << "</text>\n";
}

} // namespace

std::string emit_rate_plot_svg(const RateReport& report) {
  if (report.samples.empty()) throw std::invalid_argument("emit_rate_plot_svg: empty report");

  LogAxis xa, ya;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const RateSample& s : report.samples) {
    xmin = std::min(xmin, std::log10(s.eps));
    xmax = std::max(xmax, std::log10(s.eps));
    ymin = std::min(ymin, std::log10(s.residual));
    ymax = std::max(ymax, std::log10(s.residual));
  }
  const double xpad = std::max(0.25, 0.06 * (xmax - xmin));
  const double ypad = std::max(0.25, 0.08 * (ymax - ymin));
  xa.lo = xmin - xpad;
  xa.hi = xmax + xpad;
  ya.lo = ymin - ypad;
  ya.hi = ymax + ypad;

  const double pxl = kLeft, pxr = kW - kRight;
  const double pyt = kTop, pyb = kH - kBottom;
  auto X = [&](double lv) { return xa.to_px(lv, pxl, pxr); };
  auto Y = [&](double lv) { return ya.to_px(lv, pyb, pyt); }; // y grows upward

  std::ostringstream out;
  open_svg(out);

  // decade gridlines
  for (int d = static_cast<int>(std::ceil(xa.lo)); d <= static_cast<int>(std::floor(xa.hi)); ++d) {
    line(out, X(d), pyt, X(d), pyb, "stroke=\"#dddddd\" stroke-width=\"1\"");
    text(out, X(d) - 14, pyb + 18, "1e" + std::to_string(d));
  }
  for (int d = static_cast<int>(std::ceil(ya.lo)); d <= static_cast<int>(std::floor(ya.hi)); ++d) {
    line(out, pxl, Y(d), pxr, Y(d), "stroke=\"#dddddd\" stroke-width=\"1\"");
    text(out, 8, Y(d) + 4, "1e" + std::to_string(d));
  }
  out << "<rect x=\"" << px(pxl) << "\" y=\"" << px(pyt) << "\" width=\"" << px(pxr - pxl)
      << "\" height=\"" << px(pyb - pyt) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // reference guides with slopes 1/2 and 1/6, anchored at the largest-eps sample
  const RateSample& anchor = report.samples.front();
  const double ax = std::log10(anchor.eps), ay = std::log10(anchor.residual) + 0.15;
  for (const auto& [slope, color, label] :
       {std::tuple<double, const char*, const char*>{0.5, "#888888", "slope 1/2"},
        std::tuple<double, const char*, const char*>{1.0 / 6.0, "#bbaa88", "slope 1/6"}}) {
    const double x0 = xa.lo, x1 = xa.hi;
    const double y0 = ay + slope * (x0 - ax), y1 = ay + slope * (x1 - ax);
    line(out, X(x0), Y(y0), X(x1), Y(y1),
         std::string("stroke=\"") + color + "\" stroke-width=\"1\" stroke-dasharray=\"6,4\"");
    text(out, X(x1) - 78, Y(y1) - 4, label, std::string("fill=\"") + color + "\"");
  }

  // fitted line across the fitted samples (natural-log fit -> log10 plot)
  if (report.fit_count >= 2) {
    const double lx0 = std::log10(report.samples[0].eps);
    const double lx1 = std::log10(report.samples[report.fit_count - 1].eps);
    auto fit_y = [&](double lx) {
      const double ln_eps = lx * std::log(10.0);
      const double ln_r = report.intercept + report.slope * ln_eps;
      return ln_r / std::log(10.0);
    };
    line(out, X(lx0), Y(fit_y(lx0)), X(lx1), Y(fit_y(lx1)),
         "stroke=\"#d62728\" stroke-width=\"1.5\"");
  }

  for (std::size_t i = 0; i < report.samples.size(); ++i) {
    const RateSample& s = report.samples[i];
    const bool used = i < report.used.size() && report.used[i];
    out << "<circle cx=\"" << px(X(std::log10(s.eps))) << "\" cy=\""
        << px(Y(std::log10(s.residual))) << "\" r=\"4\" stroke=\"#1f77b4\" fill=\""
        << (used ? "#1f77b4" : "none") << "\"/>\n";
  }

  text(out, pxl, 16,
       "slope=" + sci(report.slope) + "  r2=" + sci(report.r_squared) +
           (report.plateau_detected ? "  [plateau removed]" : ""));
  text(out, (pxl + pxr) / 2 - 10, kH - 12, "eps");
  out << "</svg>\n";
  return out.str();
}

std::string emit_timeseries_svg(const std::string& title,
                                const std::vector<double>& t,
                                const std::vector<double>& v) {
  if (t.size() != v.size()) throw std::invalid_argument("emit_timeseries_svg: size mismatch");
  if (t.size() < 2) throw std::invalid_argument("emit_timeseries_svg: need at least 2 points");

  double tmin = t.front(), tmax = t.front(), vmin = v.front(), vmax = v.front();
  for (std::size_t i = 0; i < t.size(); ++i) {
    tmin = std::min(tmin, t[i]);
    tmax = std::max(tmax, t[i]);
    vmin = std::min(vmin, v[i]);
    vmax = std::max(vmax, v[i]);
  }
  if (tmax == tmin) tmax = tmin + 1;
  if (vmax == vmin) {
    vmax += 0.5;
    vmin -= 0.5;
  }
  const double pxl = kLeft, pxr = kW - kRight, pyt = kTop, pyb = kH - kBottom;
  auto X = [&](double x) { return pxl + (x - tmin) / (tmax - tmin) * (pxr - pxl); };
  auto Y = [&](double y) { return pyb - (y - vmin) / (vmax - vmin) * (pyb - pyt); };

  std::ostringstream out;
  open_svg(out);
  out << "<rect x=\"" << px(pxl) << "\" y=\"" << px(pyt) << "\" width=\"" << px(pxr - pxl)
      << "\" height=\"" << px(pyb - pyt) << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out << " ";
    out << px(X(t[i])) << "," << px(Y(v[i]));
  }
  out << "\"/>\n";
  text(out, pxl, 16, title);
  text(out, pxl - 60, pyb + 4, sci(vmin));
  text(out, pxl - 60, pyt + 4, sci(vmax));
  text(out, pxl, pyb + 18, sci(tmin));
  text(out, pxr - 40, pyb + 18, sci(tmax));
  out << "</svg>\n";
  return out.str();
}

} // namespace fastlim
