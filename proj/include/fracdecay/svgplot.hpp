#pragma once

#include <string>
#include <vector>

namespace fracdecay::svgplot {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

/// Static log-log plot with an optional reference power line anchored at
/// the last finite point of the first series.
std::string loglog(const std::vector<Series>& series, double ref_slope,
                   const std::string& title);

/// Static log-linear plot (log ordinate) with an optional reference
/// exponential e^{-rate t}.
std::string loglinear(const std::vector<Series>& series, double ref_rate,
                      const std::string& title);

}  // namespace fracdecay::svgplot
