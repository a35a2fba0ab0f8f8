#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracdecay::fracops {

enum class MeshKind { Uniform, Graded };

/// Time grid t_0 = 0 < t_1 < ... < t_N = T; graded nodes are
/// t_j = T (j/N)^gamma, uniform is the gamma = 1 special case.
class TimeGrid {
 public:
  static TimeGrid uniform(double T, std::size_t steps);
  static TimeGrid graded(double T, std::size_t steps, double gamma);

  const std::vector<double>& nodes() const { return nodes_; }
  double t(std::size_t j) const { return nodes_[j]; }
  double dt(std::size_t j) const { return nodes_[j] - nodes_[j - 1]; }
  std::size_t steps() const { return nodes_.size() - 1; }  // N
  double horizon() const { return nodes_.back(); }
  MeshKind kind() const { return kind_; }
  double gamma() const { return gamma_; }

 private:
  TimeGrid(std::vector<double> nodes, MeshKind kind, double gamma)
      : nodes_(std::move(nodes)), kind_(kind), gamma_(gamma) {}
  std::vector<double> nodes_;
  MeshKind kind_;
  double gamma_;
};

/// L1 discretization of the Caputo derivative on a TimeGrid. Exact on
/// piecewise-linear histories; alpha = 1 degenerates to the backward
/// difference (v_n - v_{n-1}) / dt_n.
///
/// The weights act on increments: (D^a v)(t_n) = sum_j a_{n,j} (v_j - v_{j-1}).
class CaputoWeights {
 public:
  CaputoWeights(TimeGrid grid, double alpha);

  double alpha() const { return alpha_; }
  const TimeGrid& grid() const { return grid_; }

  /// Fills out[j-1] = a_{n,j} for j = 1..n.
  void row(std::size_t n, std::vector<double>& out) const;
  /// a_{n,n}, the coefficient of the newest increment.
  double leading(std::size_t n) const;
  /// Discrete Caputo derivative at t_n of the sampled history.
  double apply(std::span<const double> history, std::size_t n) const;
  /// apply(...) minus the leading increment term; what an implicit step
  /// knows before solving for v_n.
  double history_term(std::span<const double> history, std::size_t n) const;

 private:
  TimeGrid grid_;
  double alpha_;
  std::vector<double> uniform_b_;  // (k+1)^{1-a} - k^{1-a} cache, uniform grids
};

/// Discrete Riemann-Liouville convolution (k^{1-alpha} * v)(t_n) by product
/// integration against the piecewise-linear interpolant of v. Nodal weights
/// are nonnegative, so the map is monotone in v.
std::vector<double> rl_convolve(double alpha, std::span<const double> series,
                                const TimeGrid& grid);

/// Per-node coercivity margins m_n = v_n (D^a v)_n - (1/2)(D^a v^2)_n.
std::vector<double> coercivity_margins(const CaputoWeights& weights,
                                       std::span<const double> history);
bool coercivity_check(const CaputoWeights& weights,
                      std::span<const double> history, double tol);

/// Discrete maximum-principle probe: at every argmax node with n >= 1 the
/// Caputo value must be >= -tol. Ties are reported at the latest node.
struct MaxPrincipleResult {
  bool pass;
  std::size_t argmax;  // latest node attaining the maximum
  double caputo_at_argmax;
};
MaxPrincipleResult max_principle_check(const CaputoWeights& weights,
                                       std::span<const double> history,
                                       double tol = 1e-10);

/// Sum-of-exponentials compression of the Caputo kernel
/// k^alpha(t) = t^{-alpha}/Gamma(1-alpha) ~ sum_i w_i exp(-lambda_i t),
/// valid to rel_tol on [delta, horizon].
struct SoeKernel {
  std::vector<double> weights;
  std::vector<double> rates;
  double delta;
  double horizon;
  double achieved_rel_error;

  static SoeKernel build(double alpha, double delta, double horizon,
                         double rel_tol = 1e-8);
  double eval(double t) const;
};

/// Sequential fast evaluator of the L1 Caputo derivative using the SoE
/// kernel for the history part; the local increment term stays exact.
/// Feed values in step order; identical interface semantics to
/// CaputoWeights::apply / history_term on the same grid.
class FastCaputo {
 public:
  FastCaputo(const TimeGrid& grid, double alpha, std::size_t n_components,
             double rel_tol = 1e-8);

  /// Advance to step n (must be called with n = 1, 2, ... in order) given
  /// the component values at t_{n-1}; returns nothing, the history term
  /// for step n is then available per component.
  void advance(std::size_t n, std::span<const double> values_prev,
               std::span<const double> values_prev2);
  double history_term(std::size_t component) const {
    return history_[component];
  }
  double leading(std::size_t n) const;
  const SoeKernel& kernel() const { return kernel_; }

 private:
  TimeGrid grid_;
  double alpha_;
  SoeKernel kernel_;
  std::vector<double> state_;    // n_components x n_exponentials
  std::vector<double> history_;  // per component
  std::size_t n_components_;
  std::size_t last_step_ = 0;
};

}  // namespace fracdecay::fracops
