#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fracdecay/model.hpp"
#include "fracdecay/space.hpp"

namespace fracdecay::steady {

struct NewtonOptions {
  int max_iterations = 50;
  int max_backtracks = 8;
  double rtol = 1e-10;
  double atol = 1e-12;
};

enum class SolveStatus { Converged, Stagnated, SingularJacobian };

struct SteadyResult {
  space::Field u;
  SolveStatus status = SolveStatus::Converged;
  int iterations = 0;
  std::vector<double> residual_history;
  std::size_t singular_node = 0;
  std::string message;

  bool ok() const { return status == SolveStatus::Converged; }
};

/// Residual of the steady problem at a state:
/// L_h u - q u + p f(u) - r_inf on interior rows, boundary rows carry the
/// Dirichlet mismatch resp. the Neumann flux defect.
space::Field steady_residual(const space::Field& u, const model::Problem& prob);

/// One damped Newton update from `current`: solve the linearized system
/// J = L_h + diag(p f'(u) - q), halve the step until the residual decreases.
/// Throws on a singular Jacobian.
space::Field newton_step(const space::Field& current,
                         const model::Problem& prob,
                         int max_backtracks = 8);

/// Damped Newton solve of the steady problem. Default initial guess is the
/// solution of the linear problem with f frozen at zero; falls back to zero
/// when that solve is unusable.
SteadyResult solve_steady(const model::Problem& prob,
                          const space::Field* initial_guess = nullptr,
                          NewtonOptions options = {});

}  // namespace fracdecay::steady
