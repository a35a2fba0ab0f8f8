#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fracdecay/fracops.hpp"
#include "fracdecay/space.hpp"

namespace fracdecay::model {

struct Growth {
  double c2 = 0.0;
  double C2 = 0.0;
  double kappa2 = 0.0;
};

/// Reaction nonlinearity with C^2 evaluators and declared growth metadata
/// |f''(xi)| <= c2 + C2 |xi|^kappa2. The normalized flag certifies
/// f(0) = f'(0) = 0.
struct Nonlinearity {
  std::function<double(double)> f, fp, fpp;
  Growth growth;
  bool normalized = false;
  std::string name = "custom";

  static Nonlinearity cubic();         // f = xi^3 (Allen-Cahn type)
  static Nonlinearity quartic();       // f = xi^4
  static Nonlinearity cubic_linear();  // f = xi^3 + xi
  static Nonlinearity custom(std::function<double(double)> f,
                             std::function<double(double)> fp,
                             std::function<double(double)> fpp, Growth g);
};

/// Source r(t,x) = r_inf(x) + pert(t) * profile(x). The power form decays
/// with ||r(t)-r_inf||_X^2 = amplitude^2 ||profile||_X^2 (1+t)^{-exponent};
/// the exponential form with rate `rate` in the same squared sense.
/// The Series kind carries explicit per-node snapshots (manufactured
/// fixtures) and is only meaningful on its time grid.
struct SourceTerm {
  enum class Kind { None, Power, Exponential, Series };
  space::Field r_inf;
  Kind kind = Kind::None;
  double amplitude = 0.0;
  double exponent = 0.0;  // decay exponent of the squared norm
  double rate = 0.0;      // squared-norm exponential rate
  space::Field profile;
  std::vector<space::Field> samples;  // Series kind, one per time node

  double modulation(double t) const;
  space::Field at(double t) const;
  space::Field at_node(const fracops::TimeGrid& tgrid, std::size_t n) const;
};

/// Full problem assembly for the transient and steady solvers.
struct Problem {
  space::Grid1D grid;
  space::EllipticOp op;
  double alpha;
  space::Field p, q;
  Nonlinearity nl;
  SourceTerm source;
  space::BoundaryCondition bc;
  space::Field u0;
  fracops::TimeGrid tgrid;
  double r_exp;  // summability index of p (may be +inf)
  double s_exp;  // summability index of q, >= 2 enforced

  void validate() const;  // component invariants + u0 boundary compliance
};

struct NormalizedParts {
  Nonlinearity nl;
  space::Field q;
  SourceTerm source;
};

/// Shift to f(0) = f'(0) = 0 without changing the problem:
/// f~ = f - f'(0) xi - f(0), q~ = q - f'(0) p, r~ = r - f(0) p.
NormalizedParts normalize(const Nonlinearity& nl, const space::Field& p,
                          const space::Field& q, const SourceTerm& source);

/// min over nodes of p f'(u_inf) - q; positive margin is the linearized
/// sign condition.
double check_pinfty(const space::Field& p, const space::Field& q,
                    const Nonlinearity& nl, const space::Field& u_inf);

struct GrowthCheck {
  bool pass;
  double worst_ratio;  // max |f''| / (c2 + C2 |xi|^kappa2) over samples
};
GrowthCheck check_growth(const Nonlinearity& nl, double lo, double hi,
                         std::size_t samples);

/// Summability classification of (d, r_exp, kappa2) per the low/high
/// regularity requirement tables.
struct Summability {
  bool lo;
  bool hi;
  bool fail() const { return !lo && !hi; }
};
Summability check_summability(int dim, double r_exp, double kappa2);

enum class DualNorm { Hminus1, L2 };

/// Smallest C_r with ||r(t_n)-r_inf||_X^2 <= C_r Psi(t_n) over n >= 1,
/// Psi = t^{-alpha} for alpha < 1 and e^{-omega t} at alpha = 1.
double check_decay_r(const SourceTerm& source, const fracops::TimeGrid& tgrid,
                     const space::Grid1D& grid,
                     const space::BoundaryCondition& bc, DualNorm X,
                     double alpha, double omega);

/// Same bound evaluated on an explicit series of source snapshots
/// (fixtures that cannot be written as r_inf + pert * profile).
double check_decay_r_series(const std::vector<space::Field>& r_series,
                            const space::Field& r_inf,
                            const fracops::TimeGrid& tgrid,
                            const space::Grid1D& grid,
                            const space::BoundaryCondition& bc, DualNorm X,
                            double alpha, double omega);

/// min over steps, nodes and theta in {0, 1/K, ..., 1} of
/// p f'(theta u + (1-theta) u_inf) - q.
double check_between_states(const space::Field& p, const space::Field& q,
                            const Nonlinearity& nl,
                            const std::vector<space::Field>& history,
                            const space::Field& u_inf,
                            std::size_t theta_count = 16);

}  // namespace fracdecay::model
