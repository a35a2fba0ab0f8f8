#include "fracdecay/steady.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fracdecay::steady {
namespace {

using space::Field;

// Jacobian L_h + diag(p f'(u) - q) with bc rows preserved.
space::Tridiag jacobian(const Field& u, const model::Problem& prob) {
  space::Tridiag jac = prob.op.system();
  const std::size_t n = prob.grid.nx;
  const bool dirichlet = prob.bc.kind == space::BcKind::Dirichlet;
  for (std::size_t i = 0; i < n; ++i) {
    if (dirichlet && (i == 0 || i + 1 == n)) continue;  // identity rows
    jac.diag[i] += prob.p[i] * prob.nl.fp(u[i]) - prob.q[i];
  }
  return jac;
}

}  // namespace

Field steady_residual(const Field& u, const model::Problem& prob) {
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
    res[i] += prob.p[i] * prob.nl.f(u[i]) - prob.q[i] * u[i] -
              prob.source.r_inf[i];
  }
  if (!dirichlet) {
    res[0] -= prob.op.neumann_rhs_shift(true);
    res[n - 1] -= prob.op.neumann_rhs_shift(false);
  }
  return res;
}

Field newton_step(const Field& current, const model::Problem& prob,
                  int max_backtracks) {
  const Field res = steady_residual(current, prob);
  const double res_norm = space::norm_L2(res, prob.grid);
  space::Tridiag jac = jacobian(current, prob);
  Field neg_res(res.size());
  for (std::size_t i = 0; i < res.size(); ++i) neg_res[i] = -res[i];
  Field delta;
  std::size_t bad = 0;
  if (!jac.solve(neg_res, delta, &bad)) {
    std::ostringstream os;
    os << "newton_step: singular Jacobian, p f'(u) - q + d degenerates near "
          "node "
       << bad << " (x = " << prob.grid.x(bad) << ")";
    throw std::runtime_error(os.str());
  }
  double step = 1.0;
  Field trial(current.size());
  for (int bt = 0; bt <= max_backtracks; ++bt) {
    for (std::size_t i = 0; i < current.size(); ++i)
      trial[i] = current[i] + step * delta[i];
    const double trial_norm =
        space::norm_L2(steady_residual(trial, prob), prob.grid);
    if (trial_norm < res_norm || res_norm == 0.0) return trial;
    step *= 0.5;
  }
  throw std::runtime_error("newton_step: line search exhausted");
}

SteadyResult solve_steady(const model::Problem& prob,
                          const Field* initial_guess, NewtonOptions options) {
  prob.validate();
  const std::size_t n = prob.grid.nx;
  SteadyResult result;

  Field u;
  if (initial_guess) {
    u = *initial_guess;
  } else {
    // linear problem with f frozen at zero: (L_h - q) u = r_inf
    space::Tridiag lin = prob.op.system();
    Field rhs = prob.source.r_inf;
    const bool dirichlet = prob.bc.kind == space::BcKind::Dirichlet;
    for (std::size_t i = 0; i < n; ++i) {
      if (dirichlet && (i == 0 || i + 1 == n)) continue;
      lin.diag[i] -= prob.q[i];
    }
    if (dirichlet) {
      rhs[0] = prob.bc.left;
      rhs[n - 1] = prob.bc.right;
    } else {
      rhs[0] += prob.op.neumann_rhs_shift(true);
      rhs[n - 1] += prob.op.neumann_rhs_shift(false);
    }
    std::size_t bad = 0;
    bool usable = lin.solve(rhs, u, &bad);
    if (usable)
      for (double v : u) usable = usable && std::isfinite(v);
    if (!usable) u.assign(n, 0.0);
  }

  const double scale = space::norm_L2(prob.source.r_inf, prob.grid);
  const double target = options.rtol * scale + options.atol;

  double res_norm = space::norm_L2(steady_residual(u, prob), prob.grid);
  result.residual_history.push_back(res_norm);
  for (int it = 0; it < options.max_iterations; ++it) {
    if (res_norm <= target) {
      result.u = u;
      result.status = SolveStatus::Converged;
      result.iterations = it;
      return result;
    }
    Field next;
    try {
      next = newton_step(u, prob, options.max_backtracks);
    } catch (const std::runtime_error& err) {
      result.u = u;  // best iterate so far
      result.iterations = it;
      result.message = err.what();
      result.status =
          std::string(err.what()).find("singular") != std::string::npos
              ? SolveStatus::SingularJacobian
              : SolveStatus::Stagnated;
      return result;
    }
    u = std::move(next);
    res_norm = space::norm_L2(steady_residual(u, prob), prob.grid);
    result.residual_history.push_back(res_norm);
  }
  result.u = u;
  result.iterations = options.max_iterations;
  if (res_norm <= target) {
    result.status = SolveStatus::Converged;
  } else {
    result.status = SolveStatus::Stagnated;
    result.message = "newton did not reach tolerance";
  }
  return result;
}

}  // namespace fracdecay::steady
