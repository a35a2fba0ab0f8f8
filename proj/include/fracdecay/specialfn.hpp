#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fracdecay::specialfn {

/// Gamma function restricted to positive arguments; throws std::domain_error
/// for x <= 0.
double gamma_fn(double x);

/// Caputo kernel k^alpha(s) = s^{-alpha} / Gamma(1-alpha), s > 0,
/// alpha in (0,1).
double kernel_k(double alpha, double s);

struct MLQuery {
  double alpha;  // in (0, 1]
  double beta;   // > 0
  double x;      // >= 0; the function is evaluated at -x
};

/// E_{alpha,beta}(-x) on the non-positive real axis.
///
/// Evaluation strategy: truncated power series for x <= 1, an integral
/// representation of the completely monotone branch for intermediate x,
/// and the algebraic asymptotic series once its optimal-truncation error
/// is negligible. Crossovers are validated in the test suite against the
/// series oracle on overlap regions.
double mittag_leffler(const MLQuery& q);
double mittag_leffler(double alpha, double beta, double x);

/// Empirical supremum of x * E_{alpha,alpha}(-x) over a dense log grid in
/// [1e-4, 1e6], refined locally around the grid maximizer. Cached per alpha.
double c_alpha_sup(double alpha);

struct BoundCheck {
  double alpha;
  double x;
  std::string bound_id;
  double lhs;
  double rhs;
  bool pass;
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  bool all_pass() const;
  std::vector<BoundCheck> violations() const;
  std::string to_csv() const;  // alpha,x,bound_id,lhs,rhs,pass
};

/// Checks, for every x in xs (sorted ascending):
///   nonneg:    E_{a,1}(-x) >= 0 and <= 1
///   rational:  E_{a,1}(-x) <= 1 / (1 + x/Gamma(1+a))
///   product:   x * E_{a,a}(-x) <= c_alpha_sup(a)
///   deriv:     s^{a-1} E_{a,a}(-s^a) == -d/ds E_{a,1}(-s^a), s = x^{1/a},
///              against a central difference (relative 1e-6; skipped at x=0)
///   monotone:  E_{a,1}(-x) non-increasing along xs
BoundReport ml_bound_suite(double alpha, const std::vector<double>& xs,
                           double abs_tol = 1e-9, double deriv_rel_tol = 1e-6);

}  // namespace fracdecay::specialfn
