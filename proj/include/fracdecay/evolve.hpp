#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fracdecay/model.hpp"
#include "fracdecay/space.hpp"

namespace fracdecay::evolve {

struct TransientOptions {
  double newton_rtol = 1e-10;
  double newton_atol = 1e-13;
  int max_newton = 30;
  int max_backtracks = 8;
  double blowup_linf = 1e6;
  bool fast_history = false;  // sum-of-exponentials history accumulation
  double soe_tol = 1e-8;
};

enum class StepStatus { Ok, NewtonFailed, BlowUp };

struct SolutionHistory {
  fracops::TimeGrid tgrid;
  std::vector<space::Field> u;  // one field per node; truncated on failure
  StepStatus status = StepStatus::Ok;
  std::size_t failed_step = 0;
  std::string message;

  bool ok() const { return status == StepStatus::Ok; }
  std::size_t last_step() const { return u.size() - 1; }
};

/// Implicit L1 time stepping of
///   d_t^alpha u + L u - q u + p f(u) = r(t)
/// with a damped Newton solve per step; alpha = 1 is backward Euler.
SolutionHistory solve_transient(const model::Problem& prob,
                                TransientOptions options = {});

/// Difference-problem residual at step n:
///   D^alpha usim + (L + pinf) usim + p (1/2 int f''(uinf + th usim) dth)
///   usim^2 - (r - r_inf),
/// an algebraic identity check on a converged history (zero to solver
/// tolerance). The theta integral uses 8-point Gauss-Legendre.
space::Field difference_residual(const SolutionHistory& history,
                                 const model::Problem& prob,
                                 const space::Field& u_inf, std::size_t n);

enum class Regime { Lo, Hi, Between };

/// Constants reported alongside every monitor trace. The embedding and
/// elliptic-regularity entries are empirical lower bounds computed on the
/// problem's own grid.
struct MonitorConstants {
  Regime regime;
  double margin;        // pinfty or between-states lower bound (c lower bar)
  double c_D;           // min diffusion
  double c_bar;         // min(margin, c_D)
  double p_inf_norm;    // max |p f'(u_inf) - q|
  double C_ell;         // empirical elliptic-regularity constant
  double mu;            // (1 + 2 ||p_inf||^2)/(2 margin)
  double mu_between;    // enlarged mu with D(0) < mu min(margin/2, c_D)/2
  double Ctilde1;       // mu/margin + 2
  double C0;            // D^0 prefactor
  double C1;            // D^1 prefactor
  double C_between;     // D(t) prefactor (reported, set to 1)
  double p_Lr;          // ||p||_{L^r}
  double q_L2;          // ||q||_{L^2}
  double emb_h1_linf, emb_h2_linf, emb_l2_lnu, emb_h1_lq1, emb_h1_lq2;
  double kappa2, c2_growth, C2_growth, C_kappa;
  bool phi1_inf_uses_phi1 = true;  // variant switch for the Phi^1_inf form

  double phi0_sim(double xi) const;
  double phi0_inf(double xi) const;
  double phi1_sim(double xi) const;
  double phi1_inf(double xi) const;
  std::string header() const;  // human-readable constants block
};

MonitorConstants monitor_constants(const model::Problem& prob,
                                   const space::Field& u_inf, Regime regime,
                                   double margin, std::uint64_t seed = 1);

/// Per-step energy-estimate quantities along a converged history.
struct MonitorTrace {
  MonitorConstants constants;
  int s = 0;       // Sobolev index of the bound (lo: 0, hi/between: 1)
  double C_r = 0;  // forcing decay constant used in the bound
  std::vector<double> t;
  std::vector<double> l2_sq, h1_sq, h2_sq, hm1_sq;  // norms of usim
  std::vector<double> D0, D1, D_between;
  std::vector<double> bound_lhs, bound_rhs;
  std::vector<std::uint8_t> barrier_ok;  // latched once violated
  double u_inf_l2 = 0, u_inf_h1 = 0;

  bool barrier_ever_tripped() const;
  bool bound_holds(double rel_slack = 1e-9) const;
  std::string csv() const;
};

MonitorTrace monitor_energy(const SolutionHistory& history,
                            const model::Problem& prob,
                            const space::Field& u_inf, Regime regime,
                            double C_r, std::uint64_t seed = 1);

/// Backward-difference u_t, the discrete Caputo derivative of the history,
/// and the PDE-route norm ||d_t^alpha usim||_{H^{s-1}} per step.
struct TimeDerivativeSeries {
  std::vector<space::Field> u_t;       // index n >= 1 at [n]
  std::vector<space::Field> caputo_u;  // discrete Caputo fields
  std::vector<double> resid_norm_sm1;  // ||d^a usim||_{H^{s-1}}, PDE route
  std::vector<double> ut_l2, ut_h1, ut_h2;
};

TimeDerivativeSeries time_derivative_series(const SolutionHistory& history,
                                            const model::Problem& prob,
                                            const space::Field& u_inf, int s);

struct BoundednessReport {
  bool preconditions_hold;  // p >= 0, q bounded, f(xi) xi >= 0 sampled
  double lhs;    // sup_n ||u||_L2^2 + sum_n dt_n ||u||_H1^2
  double rhs;    // ||u0||_L2^2 + sum_n dt_n ||r(t_n)||_{H-1}^2
  double C_T;    // lhs / rhs
};

BoundednessReport boundedness_monitor(const SolutionHistory& history,
                                      const model::Problem& prob);

}  // namespace fracdecay::evolve
