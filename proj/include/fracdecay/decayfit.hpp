#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fracdecay/evolve.hpp"
#include "fracdecay/model.hpp"

namespace fracdecay::decayfit {

struct Window {
  std::size_t i0 = 0;
  std::size_t i1 = 0;  // inclusive
};

/// Last decade [T/10, T] of the grid, widened left until it holds at least
/// `min_points` nodes.
Window last_decade(const fracops::TimeGrid& tgrid, std::size_t min_points = 10);

struct FitResult {
  bool ok = false;
  double exponent = 0.0;  // decay exponent (power) or rate omega (exponential)
  double C = 0.0;
  double r2 = 0.0;
  Window window;
  bool floored = false;   // window truncated at the noise floor
  bool at_floor = false;  // the entire window sat below the floor
  std::string note;
};

/// Least squares of log(series) against log t; the window is truncated at
/// the first node below floor_abs.
FitResult fit_power(const std::vector<double>& series,
                    const fracops::TimeGrid& tgrid, Window window,
                    double floor_abs = 1e-12, double t_shift = 0.0);

/// Least squares of log(series) against t.
FitResult fit_exponential(const std::vector<double>& series,
                          const fracops::TimeGrid& tgrid, Window window,
                          double floor_abs = 1e-12, double t_shift = 0.0);

enum class Status { Pass, Fail, Abstain };

struct Verdict {
  std::string claim;
  Status status;
  double margin = 0.0;
  double fitted = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct DecayReport {
  std::string regime;  // "power" or "exponential"
  double fitted_exponent = 0.0;
  double C = 0.0;
  double r2 = 0.0;
  Window window;
  std::vector<Verdict> verdicts;

  bool all_pass() const;   // no Fail (abstentions allowed)
  bool has_fail() const;
  std::string text() const;
  std::string csv() const;  // claim_id,status,margin,fitted_value,tolerance
};

/// Everything a theorem verdict needs from a finished run.
struct RunBundle {
  const model::Problem* prob = nullptr;
  const evolve::SolutionHistory* history = nullptr;
  const space::Field* u_inf = nullptr;
  const evolve::MonitorTrace* trace = nullptr;
  const evolve::TimeDerivativeSeries* tds = nullptr;
  double C_r = 0.0;
  double margin = 0.0;  // pinfty or between-states margin
  bool growth_ok = false;
  model::Summability summability{false, false};
  // declared decay class of r_t for the u_t theorem
  double beta_rt = 1.0;
  bool rt_square_integrable = false;
};

/// Theorem-level verdicts:
///   V1 per-step bound, V2 fitted decay rate of ||usim||_{H^s}^2,
///   V3 barrier latch, V4 tail rate of
///   ||d^a usim||_{H^{s-1}}^2 + ||usim||_{H^{s+1}}^2.
DecayReport verify_decay_theorem(const RunBundle& run, int s,
                                 evolve::Regime regime);

struct SmallnessRow {
  double radius;
  bool pass;
  std::string detail;
};

struct SmallnessTable {
  std::vector<SmallnessRow> rows;
  double largest_passing = 0.0;
};

/// Runs the transient solver from u_inf + radius * profile for each radius
/// and records whether the decay verdicts pass; an empirical lower bound
/// for the smallness radius of the theorem.
SmallnessTable smallness_probe(const model::Problem& base,
                               const space::Field& u_inf,
                               const std::vector<double>& radii,
                               const space::Field& unit_profile,
                               evolve::Regime regime = evolve::Regime::Hi);

/// u_t theorem clauses:
///   (a) alpha = 1: ||u_t||_{H^1} tail falls below 1e-3 of its initial value,
///   (b) fitted slope of ||u_t||_{H^2}^2 from t0 is <= -min(alpha,beta)+0.2,
///   (c) alpha = 1: exponential rate > 0; alpha < 1: power slope <= -alpha+0.2.
/// Abstains when the discrete u_t diverges toward t = 0 (the (utinit)
/// hypothesis cannot be bootstrapped from the PDE).
DecayReport verify_ut_theorem(const RunBundle& run, double t0);

}  // namespace fracdecay::decayfit
