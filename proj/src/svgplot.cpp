#include "fracdecay/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fracdecay::svgplot {
namespace {

constexpr int kWidth = 640, kHeight = 440;
constexpr int kMarginLeft = 70, kMarginRight = 20, kMarginTop = 36,
              kMarginBottom = 48;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

struct Box {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -std::numeric_limits<double>::infinity();
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -std::numeric_limits<double>::infinity();
  void grow(double x, double y) {
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  }
  bool valid() const { return x_lo < x_hi && y_lo <= y_hi; }
};

std::string render(const std::vector<Series>& series, bool log_x,
                   double ref_slope_or_rate, bool power_reference,
                   const std::string& title) {
  Box box;
  auto tx = [log_x](double x) { return log_x ? std::log10(x) : x; };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double x = s.x[i], y = s.y[i];
      if (y <= 0.0 || !(x > 0.0 && std::isfinite(x)) || !std::isfinite(y))
        continue;
      box.grow(tx(x), std::log10(y));
    }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        "font-family=\"monospace\" font-size=\"14\">"
     << title << "</text>\n";
  if (!box.valid()) {
    os << "<text x=\"50%\" y=\"50%\" text-anchor=\"middle\" "
          "font-family=\"monospace\">no positive data</text>\n</svg>\n";
    return os.str();
  }
  if (box.y_hi - box.y_lo < 1e-12) box.y_hi = box.y_lo + 1.0;
  const double pw = kWidth - kMarginLeft - kMarginRight;
  const double ph = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double lx) {
    return kMarginLeft + pw * (lx - box.x_lo) / (box.x_hi - box.x_lo);
  };
  auto py = [&](double ly) {
    return kMarginTop + ph * (box.y_hi - ly) / (box.y_hi - box.y_lo);
  };
  os << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
     << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  char buf[160];
  for (int k = 0; k <= 4; ++k) {
    const double ly = box.y_lo + (box.y_hi - box.y_lo) * k / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" "
                  "font-family=\"monospace\" font-size=\"11\">1e%.1f</text>\n",
                  kMarginLeft - 6, py(ly) + 4.0, ly);
    os << buf;
    const double lx = box.x_lo + (box.x_hi - box.x_lo) * k / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" "
                  "font-family=\"monospace\" font-size=\"11\">%s%.2f</text>\n",
                  px(lx), kHeight - kMarginBottom + 18,
                  log_x ? "1e" : "t=", lx);
    os << buf;
  }
  int color = 0;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << kColors[color % 4]
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.y[i] <= 0.0 || !(s.x[i] > 0.0)) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(tx(s.x[i])),
                    py(std::log10(s.y[i])));
      os << buf;
    }
    os << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"monospace\" "
                  "font-size=\"12\" fill=\"%s\">%s</text>\n",
                  kMarginLeft + 8, kMarginTop + 16 + 14 * color,
                  kColors[color % 4], s.label.c_str());
    os << buf;
    ++color;
  }
  if (ref_slope_or_rate != 0.0 && !series.empty()) {
    // anchor the reference at the last plotted point of the first series
    const auto& s = series.front();
    double ax = 0, ay = 0;
    bool found = false;
    for (std::size_t i = s.x.size(); i-- > 0;) {
      if (s.y[i] > 0.0 && s.x[i] > 0.0) {
        ax = s.x[i];
        ay = s.y[i];
        found = true;
        break;
      }
    }
    if (found) {
      std::ostringstream pts;
      for (int k = 0; k <= 40; ++k) {
        const double lx = box.x_lo + (box.x_hi - box.x_lo) * k / 40.0;
        double ly;
        if (power_reference) {
          // log10 y = log10 ay + slope (log10 x - log10 ax)
          ly = std::log10(ay) + ref_slope_or_rate * (lx - std::log10(ax));
        } else {
          ly = std::log10(ay) - ref_slope_or_rate * (lx - ax) / std::log(10.0);
        }
        if (ly < box.y_lo || ly > box.y_hi) continue;
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(lx), py(ly));
        pts << buf;
      }
      os << "<polyline fill=\"none\" stroke=\"#888\" stroke-width=\"1\" "
            "stroke-dasharray=\"5,4\" points=\""
         << pts.str() << "\"/>\n";
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%d\" y=\"%d\" text-anchor=\"end\" "
                    "font-family=\"monospace\" font-size=\"12\" "
                    "fill=\"#888\">reference %s%.3g</text>\n",
                    kWidth - kMarginRight - 8, kMarginTop + 16,
                    power_reference ? "slope " : "rate ", ref_slope_or_rate);
      os << buf;
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string loglog(const std::vector<Series>& series, double ref_slope,
                   const std::string& title) {
  return render(series, true, ref_slope, true, title);
}

std::string loglinear(const std::vector<Series>& series, double ref_rate,
                      const std::string& title) {
  return render(series, false, ref_rate, false, title);
}

}  // namespace fracdecay::svgplot
