#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace fracdecay::numerics {

// Gauss-Kronrod 7-15 pair on [-1,1] (QUADPACK dqk15 abscissae/weights).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct PanelResult {
  double integral;
  double error;
};

template <typename F>
PanelResult gauss_kronrod_15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(c);
  double gauss = kGaussWeights[3] * fc;
  double kron = kKronrodWeights[7] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double fs = f(c - dx) + f(c + dx);
    kron += kKronrodWeights[i] * fs;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fs;
  }
  kron *= half;
  gauss *= half;
  return {kron, std::abs(kron - gauss)};
}

// Adaptive bisection: repeatedly split the panel with the largest embedded
// error estimate until the global error meets the tolerance or the panel
// budget is exhausted.
template <typename F>
double integrate_adaptive(const F& f, double a, double b, double rel_tol,
                          double abs_tol, std::size_t max_panels = 2000) {
  struct Seg {
    double a, b, integral, error;
  };
  auto by_error = [](const Seg& l, const Seg& r) { return l.error < r.error; };
  PanelResult first = gauss_kronrod_15(f, a, b);
  std::vector<Seg> heap{{a, b, first.integral, first.error}};
  heap.reserve(max_panels + 1);
  double total = first.integral;
  double err_sum = first.error;
  while (heap.size() < max_panels &&
         err_sum > std::max(abs_tol, rel_tol * std::abs(total))) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    Seg s = heap.back();
    const double m = 0.5 * (s.a + s.b);
    if (m <= s.a || m >= s.b) break;  // panel at floating-point resolution
    heap.pop_back();
    PanelResult left = gauss_kronrod_15(f, s.a, m);
    PanelResult right = gauss_kronrod_15(f, m, s.b);
    total += left.integral + right.integral - s.integral;
    err_sum += left.error + right.error - s.error;
    heap.push_back({s.a, m, left.integral, left.error});
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back({m, s.b, right.integral, right.error});
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  double result = 0.0;
  for (const auto& s : heap) result += s.integral;
  return result;
}

// 8-point Gauss-Legendre nodes/weights on [0,1].
inline constexpr std::array<double, 8> kGL8Nodes = {
    0.019855071751232, 0.101666761293187, 0.237233795041836,
    0.408282678752175, 0.591717321247825, 0.762766204958164,
    0.898333238706813, 0.980144928248768};
inline constexpr std::array<double, 8> kGL8Weights = {
    0.050614268145188, 0.111190517226687, 0.156853322938944,
    0.181341891689181, 0.181341891689181, 0.156853322938944,
    0.111190517226687, 0.050614268145188};

template <typename F>
double gauss_legendre_01(const F& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < kGL8Nodes.size(); ++i)
    s += kGL8Weights[i] * f(kGL8Nodes[i]);
  return s;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t count = 0;
};

// Least squares y = slope*x + intercept.
inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  LineFit out;
  const std::size_t n = std::min(x.size(), y.size());
  out.count = n;
  if (n < 2) return out;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return out;
}

inline std::vector<double> logspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double la = std::log(lo), lb = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(la + (lb - la) * static_cast<double>(i) /
                               static_cast<double>(count - 1));
  return out;
}

}  // namespace fracdecay::numerics
