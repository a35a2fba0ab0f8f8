#include "fracdecay/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "fracdecay/fracops.hpp"
#include "fracdecay/numerics.hpp"

namespace fracdecay::evolve {
namespace {

using space::Field;

Field usim_field(const Field& u, const Field& u_inf) {
  Field d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d[i] = u[i] - u_inf[i];
  return d;
}

double linf(const Field& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// residual of the implicit L1 step at state u:
// lead (u - u_prev) + hist + L u - q u + p f(u) - r_n
Field step_residual(const Field& u, const Field& u_prev, const Field& hist,
                    double lead, const Field& r_n,
                    const model::Problem& prob) {
  const std::size_t n = prob.grid.nx;
  Field res = prob.op.system().apply(u);
  const bool dirichlet = prob.bc.kind == space::BcKind::Dirichlet;
  for (std::size_t i = 0; i < n; ++i) {
    if (dirichlet && i == 0) {
      res[i] = u[i] - prob.bc.left;
      continue;
    }
    if (dirichlet && i + 1 == n) {
      res[i] = u[i] - prob.bc.right;
      continue;
    }
    res[i] += lead * (u[i] - u_prev[i]) + hist[i] +
              prob.p[i] * prob.nl.f(u[i]) - prob.q[i] * u[i] - r_n[i];
  }
  if (!dirichlet) {
    res[0] -= prob.op.neumann_rhs_shift(true);
    res[n - 1] -= prob.op.neumann_rhs_shift(false);
  }
  return res;
}

// Gauss-Legendre value of the exact Taylor-remainder kernel
// int_0^1 (1 - th) f''(u_inf + th usim) dth, so that
// f(u_inf + usim) - f(u_inf) - f'(u_inf) usim = kernel * usim^2 identically.
double theta_integral(const model::Nonlinearity& nl, double u_inf_i,
                      double usim_i) {
  double acc = 0.0;
  for (std::size_t k = 0; k < numerics::kGL8Nodes.size(); ++k)
    acc += numerics::kGL8Weights[k] * (1.0 - numerics::kGL8Nodes[k]) *
           nl.fpp(u_inf_i + numerics::kGL8Nodes[k] * usim_i);
  return acc;
}

// (L + p_inf) usim + p (1/2 int f'' dth) usim^2 - (r_n - r_inf); the PDE
// says d_t^alpha usim equals the negative of this field
Field rhs_route_field(const Field& usim, const Field& r_n,
                      const model::Problem& prob, const Field& u_inf) {
  const std::size_t n = prob.grid.nx;
  Field out = prob.op.apply_interior(usim);
  for (std::size_t i = 0; i < n; ++i) {
    const double p_inf = prob.p[i] * prob.nl.fp(u_inf[i]) - prob.q[i];
    out[i] += p_inf * usim[i] +
              prob.p[i] * theta_integral(prob.nl, u_inf[i], usim[i]) *
                  usim[i] * usim[i] -
              (r_n[i] - prob.source.r_inf[i]);
  }
  if (prob.bc.kind == space::BcKind::Dirichlet) {
    out.front() = 0.0;
    out.back() = 0.0;
  }
  return out;
}

}  // namespace

SolutionHistory solve_transient(const model::Problem& prob,
                                TransientOptions options) {
  prob.validate();
  const std::size_t n_steps = prob.tgrid.steps();
  const std::size_t nx = prob.grid.nx;
  const bool dirichlet = prob.bc.kind == space::BcKind::Dirichlet;

  SolutionHistory out{prob.tgrid, {}, StepStatus::Ok, 0, {}};
  out.u.reserve(n_steps + 1);
  out.u.push_back(prob.u0);

  fracops::CaputoWeights weights(prob.tgrid, prob.alpha);
  std::unique_ptr<fracops::FastCaputo> fast;
  if (options.fast_history && prob.alpha < 1.0)
    fast = std::make_unique<fracops::FastCaputo>(prob.tgrid, prob.alpha, nx,
                                                 options.soe_tol);
  std::vector<double> row;
  Field hist(nx, 0.0), zero(nx, 0.0);

  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double lead = weights.leading(n);
    // history term, fixed during the Newton iteration
    if (fast) {
      fast->advance(n, out.u[n - 1], n >= 2 ? out.u[n - 2] : zero);
      for (std::size_t i = 0; i < nx; ++i) hist[i] = fast->history_term(i);
    } else if (prob.alpha < 1.0 && n >= 2) {
      weights.row(n, row);
      std::fill(hist.begin(), hist.end(), 0.0);
      for (std::size_t j = 1; j < n; ++j) {
        const double w = row[j - 1];
        const auto& uj = out.u[j];
        const auto& ujm = out.u[j - 1];
        for (std::size_t i = 0; i < nx; ++i) hist[i] += w * (uj[i] - ujm[i]);
      }
    } else {
      std::fill(hist.begin(), hist.end(), 0.0);
    }

    const Field r_n = prob.source.at_node(prob.tgrid, n);
    const double scale = std::max(
        {1.0, lead * space::norm_L2(out.u[n - 1], prob.grid),
         space::norm_L2(r_n, prob.grid)});
    const double tol = options.newton_rtol * scale + options.newton_atol;

    Field u = out.u[n - 1];  // warm start
    Field res = step_residual(u, out.u[n - 1], hist, lead, r_n, prob);
    double res_norm = space::norm_L2(res, prob.grid);
    bool converged = res_norm <= tol;
    for (int it = 0; it < options.max_newton && !converged; ++it) {
      space::Tridiag jac = prob.op.system();
      for (std::size_t i = 0; i < nx; ++i) {
        if (dirichlet && (i == 0 || i + 1 == nx)) continue;
        jac.diag[i] += lead + prob.p[i] * prob.nl.fp(u[i]) - prob.q[i];
      }
      Field neg(nx);
      for (std::size_t i = 0; i < nx; ++i) neg[i] = -res[i];
      Field delta;
      std::size_t bad = 0;
      if (!jac.solve(neg, delta, &bad)) {
        out.status = StepStatus::NewtonFailed;
        out.failed_step = n;
        std::ostringstream os;
        os << "singular Jacobian at step " << n << ", node " << bad;
        out.message = os.str();
        return out;
      }
      double damp = 1.0;
      bool accepted = false;
      Field trial(nx);
      for (int bt = 0; bt <= options.max_backtracks; ++bt) {
        for (std::size_t i = 0; i < nx; ++i)
          trial[i] = u[i] + damp * delta[i];
        Field trial_res =
            step_residual(trial, out.u[n - 1], hist, lead, r_n, prob);
        const double trial_norm = space::norm_L2(trial_res, prob.grid);
        if (trial_norm < res_norm) {
          u = trial;
          res = std::move(trial_res);
          res_norm = trial_norm;
          accepted = true;
          break;
        }
        damp *= 0.5;
      }
      if (!accepted) break;
      converged = res_norm <= tol;
    }
    if (!converged) {
      out.status = StepStatus::NewtonFailed;
      out.failed_step = n;
      std::ostringstream os;
      os << "newton stalled at step " << n << " (residual " << res_norm
         << ", tol " << tol << ")";
      out.message = os.str();
      return out;
    }
    if (linf(u) >= options.blowup_linf) {
      out.status = StepStatus::BlowUp;
      out.failed_step = n;
      std::ostringstream os;
      os << "blow-up suspected at step " << n << " (|u|_inf = " << linf(u)
         << ")";
      out.message = os.str();
      out.u.push_back(std::move(u));
      return out;
    }
    out.u.push_back(std::move(u));
  }
  return out;
}

Field difference_residual(const SolutionHistory& history,
                          const model::Problem& prob, const Field& u_inf,
                          std::size_t n) {
  if (n < 1 || n > history.last_step())
    throw std::out_of_range("difference_residual: step out of range");
  const std::size_t nx = prob.grid.nx;
  fracops::CaputoWeights weights(history.tgrid, prob.alpha);
  std::vector<double> row;
  weights.row(n, row);
  Field caputo(nx, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    const double w = row[j - 1];
    for (std::size_t i = 0; i < nx; ++i)
      caputo[i] += w * (history.u[j][i] - history.u[j - 1][i]);
  }
  const Field usim = usim_field(history.u[n], u_inf);
  const Field r_n = prob.source.at_node(history.tgrid, n);
  Field res = rhs_route_field(usim, r_n, prob, u_inf);
  for (std::size_t i = 0; i < nx; ++i) res[i] += caputo[i];
  if (prob.bc.kind == space::BcKind::Dirichlet) {
    res.front() = 0.0;
    res.back() = 0.0;
  }
  return res;
}

double MonitorConstants::phi0_sim(double xi) const {
  return C2_growth * C_kappa * std::pow(emb_l2_lnu, 0.0) *  // L2->L2 = 1
         emb_h1_linf * std::pow(xi, kappa2);
}

double MonitorConstants::phi0_inf(double xi) const {
  return phi0_sim(xi) + c2_growth * emb_l2_lnu * emb_h1_linf;
}

double MonitorConstants::phi1_sim(double xi) const {
  return C2_growth * C_kappa * std::pow(emb_h1_lq1, kappa2 + 1.0) *
         emb_h2_linf * std::pow(xi, kappa2);
}

double MonitorConstants::phi1_inf(double xi) const {
  const double base = phi1_inf_uses_phi1 ? phi1_sim(xi) : phi0_sim(xi);
  return base + c2_growth * emb_h1_lq2 * emb_h2_linf;
}

std::string MonitorConstants::header() const {
  std::ostringstream os;
  os.precision(12);
  os << "# monitor constants (embedding/regularity entries are empirical "
        "lower bounds)\n"
     << "# regime="
     << (regime == Regime::Lo ? "lo" : regime == Regime::Hi ? "hi" : "between")
     << " margin=" << margin << " c_D=" << c_D << " c_bar=" << c_bar
     << " p_inf_norm=" << p_inf_norm << "\n"
     << "# C_ell=" << C_ell << " mu=" << mu << " mu_between=" << mu_between
     << " Ctilde1=" << Ctilde1 << " C0=" << C0 << " C1=" << C1
     << " C_between=" << C_between << "\n"
     << "# p_Lr=" << p_Lr << " q_L2=" << q_L2 << " emb_h1_linf=" << emb_h1_linf
     << " emb_h2_linf=" << emb_h2_linf << " emb_l2_lnu=" << emb_l2_lnu
     << " emb_h1_lq1=" << emb_h1_lq1 << " emb_h1_lq2=" << emb_h1_lq2 << "\n";
  return os.str();
}

MonitorConstants monitor_constants(const model::Problem& prob,
                                   const Field& u_inf, Regime regime,
                                   double margin, std::uint64_t seed) {
  MonitorConstants mc{};
  mc.regime = regime;
  mc.margin = margin;
  mc.c_D = prob.op.min_diffusion();
  mc.c_bar = std::min(mc.margin, mc.c_D);
  double pn = 0.0;
  for (std::size_t i = 0; i < prob.grid.nx; ++i)
    pn = std::max(pn, std::abs(prob.p[i] * prob.nl.fp(u_inf[i]) - prob.q[i]));
  mc.p_inf_norm = pn;
  mc.C_ell = space::elliptic_regularity_constant(prob.op, seed);
  const double safe_margin = std::max(margin, 1e-300);
  mc.mu = (1.0 + 2.0 * pn * pn) / (2.0 * safe_margin);
  mc.Ctilde1 = mc.mu / safe_margin + 2.0;
  mc.kappa2 = prob.nl.growth.kappa2;
  mc.c2_growth = prob.nl.growth.c2;
  mc.C2_growth = prob.nl.growth.C2;
  mc.C_kappa = std::max(1.0, std::pow(2.0, mc.kappa2 - 1.0));
  mc.p_Lr = space::norm_Lp(prob.p, prob.r_exp, prob.grid);
  mc.q_L2 = space::norm_L2(prob.q, prob.grid);

  const double inf = std::numeric_limits<double>::infinity();
  mc.emb_h1_linf =
      space::embedding_constant(space::FromSpace::H1, inf, prob.grid, prob.bc,
                                seed);
  mc.emb_h2_linf =
      space::embedding_constant(space::FromSpace::H2, inf, prob.grid, prob.bc,
                                seed);
  // lo-regime exponents with nu = 2/(kappa2+1): L2 -> L^nu
  const double nu = 2.0 / (mc.kappa2 + 1.0);
  mc.emb_l2_lnu = space::embedding_constant(space::FromSpace::L2,
                                            std::max(1.0, nu), prob.grid,
                                            prob.bc, seed);
  // hi-regime exponents 2r/(r-2) and (kappa2+1) 2r/(r-2)
  const double q2 =
      std::isinf(prob.r_exp) ? 2.0
                             : 2.0 * prob.r_exp / (prob.r_exp - 2.0);
  mc.emb_h1_lq2 =
      space::embedding_constant(space::FromSpace::H1, q2, prob.grid, prob.bc,
                                seed);
  mc.emb_h1_lq1 = space::embedding_constant(
      space::FromSpace::H1, (mc.kappa2 + 1.0) * q2, prob.grid, prob.bc, seed);

  const double cl = mc.emb_h1_linf;  // C_{L^1 -> H^{-1}} by duality (d = 1)
  mc.C0 = cl * cl / (2.0 * mc.c_bar * mc.c_bar);
  mc.C1 = mc.C_ell * mc.C_ell * mc.Ctilde1;
  mc.C_between = 1.0;
  mc.mu_between = mc.mu;  // enlarged later from D(0)
  return mc;
}

bool MonitorTrace::barrier_ever_tripped() const {
  return !barrier_ok.empty() && barrier_ok.back() == 0;
}

bool MonitorTrace::bound_holds(double rel_slack) const {
  for (std::size_t n = 0; n < bound_lhs.size(); ++n)
    if (bound_lhs[n] > bound_rhs[n] * (1.0 + rel_slack) + 1e-14) return false;
  return true;
}

std::string MonitorTrace::csv() const {
  std::ostringstream os;
  os << constants.header();
  os << "t,norm_L2_sq,norm_H1_sq,norm_H2_sq,D0,D1,D_between,bound_lhs,"
        "bound_rhs,barrier_ok\n";
  char buf[512];
  for (std::size_t n = 0; n < t.size(); ++n) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  t[n], l2_sq[n], h1_sq[n], h2_sq[n], D0[n], D1[n],
                  D_between[n], bound_lhs[n], bound_rhs[n],
                  static_cast<int>(barrier_ok[n]));
    os << buf;
  }
  return os.str();
}

MonitorTrace monitor_energy(const SolutionHistory& history,
                            const model::Problem& prob, const Field& u_inf,
                            Regime regime, double C_r, std::uint64_t seed) {
  const std::size_t last = history.last_step();
  double margin = 0.0;
  if (regime == Regime::Between) {
    margin = model::check_between_states(prob.p, prob.q, prob.nl, history.u,
                                         u_inf);
  } else {
    margin = model::check_pinfty(prob.p, prob.q, prob.nl, u_inf);
  }
  MonitorTrace trace;
  trace.constants = monitor_constants(prob, u_inf, regime, margin, seed);
  trace.s = regime == Regime::Lo ? 0 : 1;
  trace.C_r = C_r;
  trace.u_inf_l2 = space::norm_L2(u_inf, prob.grid);
  trace.u_inf_h1 = space::norm_Hs(u_inf, 1, prob.grid);

  auto& mc = trace.constants;
  const std::size_t count = last + 1;
  trace.t.resize(count);
  trace.l2_sq.resize(count);
  trace.h1_sq.resize(count);
  trace.h2_sq.resize(count);
  trace.hm1_sq.resize(count);
  trace.D0.resize(count);
  trace.D1.resize(count);
  trace.D_between.assign(count, 0.0);
  trace.bound_lhs.assign(count, 0.0);
  trace.bound_rhs.assign(count, 0.0);
  trace.barrier_ok.assign(count, 1);

  for (std::size_t n = 0; n < count; ++n) {
    const Field usim = usim_field(history.u[n], u_inf);
    trace.t[n] = history.tgrid.t(n);
    const double l2 = space::norm_L2(usim, prob.grid);
    const double h1 = space::norm_Hs(usim, 1, prob.grid);
    const double h2 = space::norm_Hs(usim, 2, prob.grid);
    const double hm1 = space::norm_Hminus1(usim, prob.grid, prob.bc);
    trace.l2_sq[n] = l2 * l2;
    trace.h1_sq[n] = h1 * h1;
    trace.h2_sq[n] = h2 * h2;
    trace.hm1_sq[n] = hm1 * hm1;
    const double phi0 =
        mc.phi0_inf(trace.u_inf_l2) + mc.phi0_sim(l2);
    trace.D0[n] = mc.C0 * mc.p_Lr * mc.p_Lr * phi0 * phi0 * l2 * l2;
    const double phi1 = mc.phi1_inf(trace.u_inf_h1) + mc.phi1_sim(h1);
    trace.D1[n] = mc.C1 * mc.p_Lr * mc.p_Lr * phi1 * phi1 * h1 * h1;
    if (regime == Regime::Between) {
      const double inner = (mc.p_Lr * phi1 + mc.q_L2) * mc.emb_h2_linf;
      trace.D_between[n] = mc.C_between * inner * inner;
    }
  }

  // between-regime mu: enlarged so that D(0) < mu min(margin/2, c_D)/2
  if (regime == Regime::Between) {
    const double denom = std::min(0.5 * mc.margin, mc.c_D);
    if (denom > 0.0)
      mc.mu_between =
          std::max(mc.mu, 4.0 * trace.D_between[0] / std::max(denom, 1e-300));
  }

  // barrier latches
  bool ok = true;
  for (std::size_t n = 0; n < count; ++n) {
    if (regime == Regime::Between) {
      const double cap =
          0.5 * mc.mu_between * std::min(0.5 * mc.margin, mc.c_D);
      if (trace.D_between[n] >= cap) ok = false;
    } else {
      const double d = trace.s == 0 ? trace.D0[n] : trace.D1[n];
      if (d > 0.5) ok = false;
    }
    trace.barrier_ok[n] = ok ? 1 : 0;
  }

  // bound (c/2)(k^{1-a} * ||usim||_{H^{s+1}}^2) + ||usim||_{H^s}^2
  //   <= ||usim(0)||_{H^s}^2 + C_r/(Gamma(a) a (1-a))
  if (prob.alpha < 1.0) {
    const auto& high = trace.s == 0 ? trace.h1_sq : trace.h2_sq;
    const auto& low = trace.s == 0 ? trace.l2_sq : trace.h1_sq;
    std::vector<double> high_on_grid(high.begin(), high.end());
    // rl_convolve(alpha, .) is the k^{1-alpha} convolution
    const auto conv =
        fracops::rl_convolve(prob.alpha, high_on_grid, history.tgrid);
    const double rhs =
        low[0] + C_r / (std::tgamma(prob.alpha) * prob.alpha *
                        (1.0 - prob.alpha));
    for (std::size_t n = 0; n < count; ++n) {
      trace.bound_lhs[n] = 0.5 * mc.c_bar * conv[n] + low[n];
      trace.bound_rhs[n] = rhs;
    }
  }
  return trace;
}

TimeDerivativeSeries time_derivative_series(const SolutionHistory& history,
                                            const model::Problem& prob,
                                            const Field& u_inf, int s) {
  const std::size_t last = history.last_step();
  const std::size_t nx = prob.grid.nx;
  TimeDerivativeSeries out;
  out.u_t.assign(last + 1, Field(nx, 0.0));
  out.caputo_u.assign(last + 1, Field(nx, 0.0));
  out.resid_norm_sm1.assign(last + 1, 0.0);
  out.ut_l2.assign(last + 1, 0.0);
  out.ut_h1.assign(last + 1, 0.0);
  out.ut_h2.assign(last + 1, 0.0);

  fracops::CaputoWeights weights(history.tgrid, prob.alpha);
  std::vector<double> row;
  for (std::size_t n = 1; n <= last; ++n) {
    const double tau = history.tgrid.dt(n);
    for (std::size_t i = 0; i < nx; ++i)
      out.u_t[n][i] = (history.u[n][i] - history.u[n - 1][i]) / tau;
    out.ut_l2[n] = space::norm_L2(out.u_t[n], prob.grid);
    out.ut_h1[n] = space::norm_Hs(out.u_t[n], 1, prob.grid);
    out.ut_h2[n] = space::norm_Hs(out.u_t[n], 2, prob.grid);

    weights.row(n, row);
    for (std::size_t j = 1; j <= n; ++j) {
      const double w = row[j - 1];
      for (std::size_t i = 0; i < nx; ++i)
        out.caputo_u[n][i] += w * (history.u[j][i] - history.u[j - 1][i]);
    }

    const Field usim = usim_field(history.u[n], u_inf);
    const Field r_n = prob.source.at_node(history.tgrid, n);
    const Field rhs = rhs_route_field(usim, r_n, prob, u_inf);
    out.resid_norm_sm1[n] =
        s == 1 ? space::norm_L2(rhs, prob.grid)
               : space::norm_Hminus1(rhs, prob.grid, prob.bc);
  }
  return out;
}

BoundednessReport boundedness_monitor(const SolutionHistory& history,
                                      const model::Problem& prob) {
  BoundednessReport report{};
  bool pre = true;
  for (double v : prob.p) pre = pre && v >= 0.0;
  for (double xi = -10.0; xi <= 10.0; xi += 0.25)
    pre = pre && prob.nl.f(xi) * xi >= -1e-12;
  report.preconditions_hold = pre;

  double sup_l2 = 0.0, sum_h1 = 0.0, sum_r = 0.0;
  for (std::size_t n = 0; n <= history.last_step(); ++n) {
    const double l2 = space::norm_L2(history.u[n], prob.grid);
    sup_l2 = std::max(sup_l2, l2 * l2);
    if (n >= 1) {
      const double h1 = space::norm_Hs(history.u[n], 1, prob.grid);
      sum_h1 += history.tgrid.dt(n) * h1 * h1;
      const Field r_n = prob.source.at_node(history.tgrid, n);
      const double rn = space::norm_Hminus1(r_n, prob.grid, prob.bc);
      sum_r += history.tgrid.dt(n) * rn * rn;
    }
  }
  const double u0 = space::norm_L2(history.u[0], prob.grid);
  report.lhs = sup_l2 + sum_h1;
  report.rhs = u0 * u0 + sum_r;
  report.C_T = report.rhs > 0.0
                   ? report.lhs / report.rhs
                   : (report.lhs > 0.0
                          ? std::numeric_limits<double>::infinity()
                          : 0.0);
  return report;
}

}  // namespace fracdecay::evolve
