#pragma once

// Test-only oracles, independent of the library implementation paths they
// check: quadrature-based erfc, long-double Mittag-Leffler power series,
// closed-form Beta, random trigonometric polynomials.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fracdecay/numerics.hpp"

namespace oracles {

// erfc(x) = (2/sqrt(pi)) int_x^inf e^{-t^2} dt by adaptive quadrature on a
// truncated interval (remainder below machine precision at t = x + 9).
inline double erfc_quadrature(double x) {
  auto f = [](double t) { return std::exp(-t * t); };
  const double upper = x + 9.0;
  const double integral =
      fracdecay::numerics::integrate_adaptive(f, x, upper, 1e-15, 1e-300);
  return 2.0 / std::sqrt(3.14159265358979323846) * integral;
}

// Long-double power series for E_{alpha,beta}(-x). Returns false when
// alternating-term cancellation exceeds the long-double headroom (the
// partial sums amplify roundoff by max_term/|sum|).
inline bool ml_series_checked(long double alpha, long double beta,
                              long double x, double& out) {
  long double sum = 0.0L;
  long double term = 1.0L;  // (-x)^k
  long double max_term = 0.0L;
  for (int k = 0; k <= 4000; ++k) {
    const long double add = term * expl(-lgammal(alpha * k + beta));
    max_term = std::max(max_term, fabsl(add));
    sum += add;
    term *= -x;
    if (fabsl(term) * expl(-lgammal(alpha * (k + 1) + beta)) <
            1e-25L * fabsl(sum) &&
        k > 8)
      break;
  }
  out = static_cast<double>(sum);
  return sum != 0.0L && max_term < 1e6L * fabsl(sum);
}

// Spectral-measure oracle (Gorenflo & Mainardi): t -> E_{a,1}(-t^a) is the
// Laplace transform of the spectral density
//   H_a(r) = (1/pi) r^{a-1} sin(a pi) / (r^{2a} + 2 r^a cos(a pi) + 1),
// so with t = x^{1/a}
//   E_{a,1}(-x)  = int_0^inf e^{-t r} H_a(r) dr,
//   E_{a,a}(-x)  = t^{1-a}  int_0^inf r e^{-t r} H_a(r) dr
// (the second line is -d/ds E_{a,1}(-s^a) = s^{a-1} E_{a,a}(-s^a) unwound).
// After r = w^{1/a} the density is smooth. Entirely different route from
// the library's kernel integral.
inline double ml_spectral(double alpha, bool beta_is_alpha, double x) {
  const double pi = 3.14159265358979323846;
  const double c = std::cos(alpha * pi), s = std::sin(alpha * pi);
  const double t = std::pow(x, 1.0 / alpha);
  auto integrand = [&](double w) {
    const double r = std::pow(w, 1.0 / alpha);
    const double dens = s / (pi * alpha * (w * w + 2.0 * w * c + 1.0));
    const double weight = beta_is_alpha ? std::pow(t, 1.0 - alpha) * r : 1.0;
    return weight * std::exp(-t * r) * dens;
  };
  // e^{-t w^{1/a}} is below 1e-30 past w = (70/t)^a = 70^a/x; keep at least
  // the O(1) Lorentzian scale. Decade splitting resolves the spike near
  // w ~ x^{-1} that a single adaptive call can miss. Intended for x >= 0.5.
  const double w_max = std::max(1.0, std::pow(70.0, alpha) / x);
  double total = 0.0;
  double hi = w_max;
  for (int k = 0; k < 30; ++k) {
    const double lo = (k == 29) ? 0.0 : hi / 10.0;
    total += fracdecay::numerics::integrate_adaptive(integrand, lo, hi, 1e-14,
                                                     1e-300, 600);
    hi = lo;
  }
  return total;
}

inline double beta_closed_form(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Random trigonometric polynomial t -> sum a_k sin(k w t) + b_k cos(k w t).
inline std::function<double(double)> random_trig_poly(std::mt19937_64& rng,
                                                      int modes, double period) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> a(modes), b(modes);
  for (int k = 0; k < modes; ++k) {
    a[k] = coef(rng);
    b[k] = coef(rng);
  }
  const double w = 2.0 * 3.14159265358979323846 / period;
  return [a, b, w, modes](double t) {
    double s = 0.0;
    for (int k = 0; k < modes; ++k)
      s += a[k] * std::sin((k + 1) * w * t) + b[k] * std::cos((k + 1) * w * t);
    return s;
  };
}

}  // namespace oracles
