#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fracdecay/fracops.hpp"

namespace fracdecay::gronwall {

/// Forcing phi for the comparison problem d_t^alpha eta + c0 eta <= phi.
struct Forcing {
  enum class Kind { Zero, Constant, Power, Exponential, Series };
  Kind kind = Kind::Zero;
  double phi0 = 0.0;  // scale of the closed forms
  double c1 = 0.0;    // exponential rate
  std::vector<double> series;  // sampled on the grid nodes (Series kind)

  static Forcing zero() { return {}; }
  static Forcing constant(double phi0);
  static Forcing power(double phi0);  // phi(t) = phi0 t^{-alpha}
  static Forcing exponential(double phi0, double c1);
  static Forcing sampled(std::vector<double> values);

  // closed-form value; Series values are looked up by node index
  double value(double t, double alpha) const;
  double at_node(const fracops::TimeGrid& grid, std::size_t n,
                 double alpha) const;
};

struct MajorantSpec {
  double alpha;  // in (0, 1]
  double c0;     // > 0
  double eta0;   // >= 0
  Forcing phi;
};

/// How the Mittag-Leffler factor is frozen on quadrature panels: at the
/// panel midpoint, or at the right endpoint where E is largest (an upward-
/// safe evaluation of the majorant).
enum class EFreeze { Midpoint, Upper };

/// nu(t_n) = E_{a,1}(-c0 t_n^a) eta0
///         + int_0^{t_n} (t_n-s)^{a-1} E_{a,a}(-c0 (t_n-s)^a) phi(s) ds
/// by product integration: the kernel power is integrated exactly against
/// the piecewise-linear phi, E is frozen per panel, and the power-forcing
/// endpoint singularity at s = 0 is integrated exactly on the first panel.
/// At alpha = 1 the exponential panels are exact.
std::vector<double> nu_majorant(const MajorantSpec& spec,
                                const fracops::TimeGrid& grid,
                                EFreeze freeze = EFreeze::Midpoint);

/// nu on a subset of nodes (same quadrature over all panels up to each
/// requested node); used for long grids.
std::vector<double> nu_majorant_at(const MajorantSpec& spec,
                                   const fracops::TimeGrid& grid,
                                   const std::vector<std::size_t>& nodes,
                                   EFreeze freeze = EFreeze::Midpoint);

struct MajorizationReport {
  bool pass;
  double worst_gap;       // max over nodes of eta - nu (signed)
  std::size_t worst_node;
};

/// Asserts eta(t_n) <= nu(t_n) (1 + 1e-6) + 1e-12 at all nodes.
MajorizationReport check_majorization(const std::vector<double>& eta,
                                      const MajorantSpec& spec,
                                      const fracops::TimeGrid& grid,
                                      EFreeze freeze = EFreeze::Midpoint);

/// C(alpha) = 2^a (1 + a + C_a int_{1/2}^1 s^{a-1} (1-s)^{-a} ds) with C_a
/// the empirical supremum from specialfn.
double c_of_alpha(double alpha);

struct PowerBound {
  double coefficient;   // Gamma(1+a) c0^{-a} eta0 + phi0 C(a)/c0
  bool holds;           // nu(t_n) <= K t_n^{-a} for all n >= 1
  double worst_ratio;   // max nu(t_n) t_n^a / K
};
PowerBound power_decay_bound(const MajorantSpec& spec,
                             const fracops::TimeGrid& grid);

struct ExpBound {
  double coefficient;  // eta0 + phi0/(c1 - c0)
  bool holds;
  double worst_ratio;
};
/// alpha = 1 with exponential forcing, c1 > c0 required.
ExpBound exp_decay_bound(const MajorantSpec& spec,
                         const fracops::TimeGrid& grid);

enum class BarrierStatus { PremiseNotMet, Pass, Violated };
struct BarrierReport {
  BarrierStatus status;
  double premise_value;          // Phi(eta(0) + c2/(Gamma(a) a (1-a)))
  std::size_t first_violation;   // valid when status == Violated
};

/// Barrier implication: if Phi(eta(0) + c2/(Gamma(a)a(1-a))) < 1 then
/// Phi(eta(t_n)) <= 1 must hold at every node.
BarrierReport barrier_implication(const std::vector<double>& eta,
                                  const std::function<double(double)>& Phi,
                                  double c2, double alpha,
                                  const fracops::TimeGrid& grid);

struct Eta01Report {
  bool premise_ok;
  double slope0 = 0.0, slope1 = 0.0;  // fitted tail slopes (alpha < 1)
  double coef0 = 0.0, coef1 = 0.0;    // sup of eta_j t^{min(a,b)} on the tail
  double bound0 = 0.0, bound1 = 0.0;  // 1.5 * C_j targets
  bool rate_ok0 = false, rate_ok1 = false;
  bool coef_ok0 = false, coef_ok1 = false;
  std::string note;
};

/// Tauberian-style rate checks for the pair inequality
/// d_t^a eta0 + c0 eta0 + c1 eta1 <= C t^{-beta} (alpha < 1), resp. the
/// exponential variant at alpha = 1.
Eta01Report eta01_rates(const std::vector<double>& eta0,
                        const std::vector<double>& eta1, double c0, double c1,
                        double C, double beta, double alpha,
                        const fracops::TimeGrid& grid);

/// L1 solve of d_t^alpha eta + c0 eta = phi, eta(0) = eta0.
std::vector<double> solve_fractional_ode(double alpha, double c0,
                                         const Forcing& phi, double eta0,
                                         const fracops::TimeGrid& grid);

/// Same solve through the sum-of-exponentials fast history (for long grids).
std::vector<double> solve_fractional_ode_fast(double alpha, double c0,
                                              const Forcing& phi, double eta0,
                                              const fracops::TimeGrid& grid,
                                              double soe_tol = 1e-9);

}  // namespace fracdecay::gronwall
