#include "fracdecay/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "fracdecay/numerics.hpp"

namespace fracdecay::specialfn {
namespace {

constexpr double kPi = 3.14159265358979323846;

// 1/Gamma(z) for arbitrary real z, via reflection for z <= 0.
double reciprocal_gamma(double z) {
  if (z > 0.0) return std::exp(-std::lgamma(z));
  // exact zero at the Gamma poles (sin(pi z) in floating point is not)
  if (std::abs(z - std::round(z)) < 1e-13) return 0.0;
  // 1/Gamma(z) = sin(pi z) Gamma(1-z) / pi
  return std::sin(kPi * z) * std::exp(std::lgamma(1.0 - z)) / kPi;
}

double ml_series(double alpha, double beta, double x) {
  // sum_k (-x)^k / Gamma(alpha k + beta)
  double sum = reciprocal_gamma(beta);
  double term = 1.0;
  for (int k = 1; k <= 500; ++k) {
    term *= -x;
    const double add = term * reciprocal_gamma(alpha * k + beta);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum) && k > 4) break;
  }
  return sum;
}

// Algebraic asymptotic expansion sum_{k>=1} (-1)^{k-1} x^{-k}/Gamma(beta-alpha k),
// truncated at the smallest term.
// converged reports that the smallest retained term is negligible relative
// to the sum; otherwise the caller must fall back to the integral.
double ml_asymptotic(double alpha, double beta, double x, bool& converged) {
  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  double xpow = 1.0 / x;
  double sign = 1.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 400; ++k) {
    const double rg = reciprocal_gamma(beta - alpha * k);
    const double term = sign * xpow * rg;
    // Gamma poles give exactly-zero terms; they carry no size information.
    if (rg != 0.0) {
      if (std::abs(term) > prev) break;  // divergence onset
      sum += term;
      smallest = std::min(smallest, std::abs(term));
      if (sum != 0.0 && std::abs(term) < 1e-17 * std::abs(sum)) break;
      prev = std::abs(term);
    }
    xpow /= x;
    sign = -sign;
  }
  converged = sum != 0.0 && smallest <= 1e-13 * std::abs(sum);
  return sum;
}

// Spectral (completely monotone) representation for 0 < alpha < 1, x > 0,
// written in the variable u = r^{1/alpha}:
//   E_{a,b}(-x) = (1/pi) int_0^inf e^{-u} u^{a-b}
//                 * [u^a sin(pi(1-b)) + x sin(pi(1-b+a))]
//                 / (u^{2a} + 2 u^a x cos(a pi) + x^2) du.
// The endpoint power u^{a-b} is smoothed by a further substitution u = y^m.
double ml_integral(double alpha, double beta, double x) {
  const double cos_api = std::cos(alpha * kPi);
  const double sin_b = std::sin(kPi * (1.0 - beta));
  const double sin_ab = std::sin(kPi * (1.0 - beta + alpha));
  const double a_min = alpha - beta;
  // lowest endpoint exponent among the terms actually present
  double a_eff = std::numeric_limits<double>::infinity();
  if (std::abs(sin_b) > 1e-15) a_eff = std::min(a_eff, a_min + alpha);
  if (std::abs(sin_ab) > 1e-15) a_eff = std::min(a_eff, a_min);
  int m = 1;
  const bool integer_exponent =
      std::abs(a_eff - std::round(a_eff)) < 1e-12 && a_eff >= -1e-12;
  if (!integer_exponent && a_eff < 3.0)
    m = std::min(64, static_cast<int>(std::ceil(4.0 / (1.0 + a_eff))));
  auto kernel = [&](double y) {
    const double u = m == 1 ? y : std::pow(y, m);
    const double ua = std::pow(u, alpha);
    const double denom = ua * ua + 2.0 * ua * x * cos_api + x * x;
    const double num = ua * sin_b + x * sin_ab;
    const double jac = m == 1 ? 1.0 : m * std::pow(y, m - 1);
    return jac * std::exp(-u) * std::pow(u, a_min) * num / denom / kPi;
  };
  // e^{-u} tail is negligible past u = 45.
  const double y_max = std::pow(45.0, 1.0 / m);
  return numerics::integrate_adaptive(kernel, 0.0, y_max, 5e-14, 1e-300, 4000);
}

// The optimal-truncation remainder of the asymptotic series is
// O(exp(-x^{1/alpha})); require it to be small relative to the first
// non-vanishing algebraic term.
bool asymptotic_ok(double alpha, double beta, double x) {
  double lead = 0.0;
  for (int k = 1; k <= 3; ++k)
    lead = std::max(
        lead, std::abs(reciprocal_gamma(beta - alpha * k)) * std::pow(x, -k));
  if (lead == 0.0) return false;
  return std::pow(x, 1.0 / alpha) >= 30.0 - std::log(lead);
}

std::mutex c_alpha_mutex;
std::map<double, double> c_alpha_cache;

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0)) {
    std::ostringstream os;
    os << "gamma_fn requires x > 0, got " << x;
    throw std::domain_error(os.str());
  }
  return std::tgamma(x);
}

double kernel_k(double alpha, double s) {
  if (!(s > 0.0)) {
    std::ostringstream os;
    os << "kernel_k requires s > 0, got " << s;
    throw std::domain_error(os.str());
  }
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("kernel_k requires alpha in (0,1)");
  return std::pow(s, -alpha) / std::tgamma(1.0 - alpha);
}

double mittag_leffler(double alpha, double beta, double x) {
  return mittag_leffler(MLQuery{alpha, beta, x});
}

double mittag_leffler(const MLQuery& q) {
  const double alpha = q.alpha, beta = q.beta, x = q.x;
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("mittag_leffler requires alpha in (0,1]");
  if (!(beta > 0.0)) throw std::domain_error("mittag_leffler requires beta > 0");
  if (!(x >= 0.0)) throw std::domain_error("mittag_leffler requires x >= 0");

  if (x == 0.0) return reciprocal_gamma(beta);
  if (alpha == 1.0) {
    if (beta == 1.0) return std::exp(-x);
    if (beta == 2.0) return x < 1e-8 ? 1.0 - 0.5 * x : (1.0 - std::exp(-x)) / x;
    throw std::domain_error(
        "mittag_leffler at alpha=1 supports beta in {1,2} only");
  }
  if (x <= 1.0) return ml_series(alpha, beta, x);
  if (asymptotic_ok(alpha, beta, x)) {
    bool converged = false;
    const double value = ml_asymptotic(alpha, beta, x, converged);
    if (converged) return value;
  }
  return ml_integral(alpha, beta, x);
}

double c_alpha_sup(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("c_alpha_sup requires alpha in (0,1)");
  {
    std::lock_guard<std::mutex> lock(c_alpha_mutex);
    auto it = c_alpha_cache.find(alpha);
    if (it != c_alpha_cache.end()) return it->second;
  }
  auto product = [alpha](double x) {
    return x * mittag_leffler(alpha, alpha, x);
  };
  const auto grid = numerics::logspace(1e-4, 1e6, 2000);
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = product(grid[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  // Golden-section refinement in log x around the grid maximizer keeps the
  // result stable under grid-density changes.
  double lo = std::log(grid[best > 0 ? best - 1 : best]);
  double hi = std::log(grid[std::min(best + 1, grid.size() - 1)]);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
  double fa = product(std::exp(a)), fb = product(std::exp(b));
  for (int it = 0; it < 80; ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + gr * (hi - lo);
      fb = product(std::exp(b));
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - gr * (hi - lo);
      fa = product(std::exp(a));
    }
  }
  const double sup = std::max({best_val, fa, fb});
  std::lock_guard<std::mutex> lock(c_alpha_mutex);
  c_alpha_cache[alpha] = sup;
  return sup;
}

bool BoundReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const BoundCheck& c) { return c.pass; });
}

std::vector<BoundCheck> BoundReport::violations() const {
  std::vector<BoundCheck> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c);
  return out;
}

std::string BoundReport::to_csv() const {
  std::ostringstream os;
  os << "alpha,x,bound_id,lhs,rhs,pass\n";
  os.precision(17);
  for (const auto& c : checks)
    os << c.alpha << ',' << c.x << ',' << c.bound_id << ',' << c.lhs << ','
       << c.rhs << ',' << (c.pass ? 1 : 0) << '\n';
  return os.str();
}

BoundReport ml_bound_suite(double alpha, const std::vector<double>& xs,
                           double abs_tol, double deriv_rel_tol) {
  if (xs.empty()) throw std::invalid_argument("ml_bound_suite: xs empty");
  if (!std::is_sorted(xs.begin(), xs.end()))
    throw std::invalid_argument("ml_bound_suite: xs must be sorted ascending");
  BoundReport report;
  const double c_alpha = c_alpha_sup(alpha);
  const double gamma1a = std::tgamma(1.0 + alpha);
  double prev_e1 = std::numeric_limits<double>::infinity();
  for (double x : xs) {
    const double e1 = mittag_leffler(alpha, 1.0, x);
    report.checks.push_back(
        {alpha, x, "nonneg", e1, 0.0, e1 >= -abs_tol && e1 <= 1.0 + abs_tol});
    const double rational = 1.0 / (1.0 + x / gamma1a);
    report.checks.push_back(
        {alpha, x, "rational", e1, rational, e1 <= rational + abs_tol});
    const double prod = x * mittag_leffler(alpha, alpha, x);
    report.checks.push_back(
        {alpha, x, "product", prod, c_alpha, prod <= c_alpha * (1.0 + 1e-9) + abs_tol});
    if (x > 0.0) {
      // derivative identity at s = x^{1/alpha}, c0 = 1
      const double s = std::pow(x, 1.0 / alpha);
      const double lhs =
          std::pow(s, alpha - 1.0) * mittag_leffler(alpha, alpha, x);
      const double h = 1e-5 * s;
      const double fp = mittag_leffler(alpha, 1.0, std::pow(s + h, alpha));
      const double fm = mittag_leffler(alpha, 1.0, std::pow(s - h, alpha));
      const double rhs = -(fp - fm) / (2.0 * h);
      const bool ok =
          std::abs(lhs - rhs) <= deriv_rel_tol * std::max(std::abs(lhs), 1e-300);
      report.checks.push_back({alpha, x, "deriv", lhs, rhs, ok});
    }
    report.checks.push_back(
        {alpha, x, "monotone", e1, prev_e1, e1 <= prev_e1 + abs_tol});
    prev_e1 = e1;
  }
  return report;
}

}  // namespace fracdecay::specialfn
