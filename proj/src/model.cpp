#include "fracdecay/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracdecay::model {

Nonlinearity Nonlinearity::cubic() {
  Nonlinearity nl;
  nl.f = [](double x) { return x * x * x; };
  nl.fp = [](double x) { return 3.0 * x * x; };
  nl.fpp = [](double x) { return 6.0 * x; };
  nl.growth = {0.0, 6.0, 1.0};
  nl.normalized = true;
  nl.name = "cubic";
  return nl;
}

Nonlinearity Nonlinearity::quartic() {
  Nonlinearity nl;
  nl.f = [](double x) { return x * x * x * x; };
  nl.fp = [](double x) { return 4.0 * x * x * x; };
  nl.fpp = [](double x) { return 12.0 * x * x; };
  nl.growth = {0.0, 12.0, 2.0};
  nl.normalized = true;
  nl.name = "quartic";
  return nl;
}

Nonlinearity Nonlinearity::cubic_linear() {
  Nonlinearity nl;
  nl.f = [](double x) { return x * x * x + x; };
  nl.fp = [](double x) { return 3.0 * x * x + 1.0; };
  nl.fpp = [](double x) { return 6.0 * x; };
  nl.growth = {0.0, 6.0, 1.0};
  nl.normalized = false;  // f'(0) = 1
  nl.name = "cubic_linear";
  return nl;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> f,
                                  std::function<double(double)> fp,
                                  std::function<double(double)> fpp,
                                  Growth g) {
  Nonlinearity nl;
  nl.f = std::move(f);
  nl.fp = std::move(fp);
  nl.fpp = std::move(fpp);
  nl.growth = g;
  nl.normalized =
      std::abs(nl.f(0.0)) <= 1e-14 && std::abs(nl.fp(0.0)) <= 1e-14;
  return nl;
}

double SourceTerm::modulation(double t) const {
  switch (kind) {
    case Kind::None:
    case Kind::Series:
      return 0.0;
    case Kind::Power:
      // squared-norm decay (1+t)^{-exponent}
      return amplitude * std::pow(1.0 + t, -0.5 * exponent);
    case Kind::Exponential:
      return amplitude * std::exp(-0.5 * rate * t);
  }
  return 0.0;
}

space::Field SourceTerm::at(double t) const {
  if (kind == Kind::Series)
    throw std::logic_error("SourceTerm: sampled source needs at_node");
  space::Field r = r_inf;
  if (kind == Kind::None || amplitude == 0.0) return r;
  const double m = modulation(t);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += m * profile[i];
  return r;
}

space::Field SourceTerm::at_node(const fracops::TimeGrid& tgrid,
                                 std::size_t n) const {
  if (kind == Kind::Series) {
    if (samples.size() != tgrid.nodes().size())
      throw std::invalid_argument("SourceTerm: sample count mismatch");
    return samples[n];
  }
  return at(tgrid.t(n));
}

void Problem::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("Problem: alpha must be in (0,1]");
  const std::size_t n = grid.nx;
  if (p.size() != n || q.size() != n || u0.size() != n ||
      source.r_inf.size() != n)
    throw std::invalid_argument("Problem: field sizes must match the grid");
  if ((source.kind == SourceTerm::Kind::Power ||
       source.kind == SourceTerm::Kind::Exponential) &&
      source.profile.size() != n)
    throw std::invalid_argument("Problem: perturbation profile size mismatch");
  if (source.kind == SourceTerm::Kind::Series &&
      source.samples.size() != tgrid.nodes().size())
    throw std::invalid_argument("Problem: source sample count mismatch");
  if (!(s_exp >= 2.0))
    throw std::invalid_argument("Problem: summability s_exp >= 2 required");
  if (!(r_exp >= 1.0))
    throw std::invalid_argument("Problem: summability r_exp >= 1 required");
  if (bc.kind == space::BcKind::Dirichlet) {
    if (std::abs(u0.front() - bc.left) > 1e-12 ||
        std::abs(u0.back() - bc.right) > 1e-12)
      throw std::invalid_argument(
          "Problem: initial state violates the Dirichlet data");
  }
}

NormalizedParts normalize(const Nonlinearity& nl, const space::Field& p,
                          const space::Field& q, const SourceTerm& source) {
  const double f0 = nl.f(0.0);
  const double fp0 = nl.fp(0.0);
  NormalizedParts out{nl, q, source};
  if (std::abs(f0) <= 1e-14 && std::abs(fp0) <= 1e-14) {
    out.nl.normalized = true;
    return out;
  }
  auto f = nl.f, fp = nl.fp;
  out.nl.f = [f, fp0, f0](double x) { return f(x) - fp0 * x - f0; };
  out.nl.fp = [fp, fp0](double x) { return fp(x) - fp0; };
  out.nl.fpp = nl.fpp;  // unchanged by the affine shift
  out.nl.normalized = true;
  out.nl.name = nl.name + "_normalized";
  // q u - p f(u) = (q - f'(0) p) u - p f~(u) - p f(0)
  for (std::size_t i = 0; i < q.size(); ++i) out.q[i] = q[i] - fp0 * p[i];
  for (std::size_t i = 0; i < source.r_inf.size(); ++i)
    out.source.r_inf[i] = source.r_inf[i] - f0 * p[i];
  return out;
}

double check_pinfty(const space::Field& p, const space::Field& q,
                    const Nonlinearity& nl, const space::Field& u_inf) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i)
    margin = std::min(margin, p[i] * nl.fp(u_inf[i]) - q[i]);
  return margin;
}

GrowthCheck check_growth(const Nonlinearity& nl, double lo, double hi,
                         std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("check_growth: samples >= 2");
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double xi =
        lo + (hi - lo) * static_cast<double>(i) / (samples - 1);
    const double bound =
        nl.growth.c2 + nl.growth.C2 * std::pow(std::abs(xi), nl.growth.kappa2);
    if (bound <= 0.0) {
      if (std::abs(nl.fpp(xi)) > 0.0) return {false, 1e300};
      continue;
    }
    worst = std::max(worst, std::abs(nl.fpp(xi)) / bound);
  }
  return {worst <= 1.0 + 1e-12, worst};
}

Summability check_summability(int dim, double r_exp, double kappa2) {
  Summability s{false, false};
  const bool r_inf = std::isinf(r_exp);
  s.lo = dim == 1 && r_inf && kappa2 == 1.0;
  switch (dim) {
    case 1:
      s.hi = r_exp >= 2.0 && kappa2 >= 0.0;
      break;
    case 2:
      s.hi = r_exp > 2.0 && kappa2 >= 0.0 && !std::isinf(kappa2);
      break;
    case 3:
      s.hi = r_exp >= 6.0 && kappa2 >= 0.0 && kappa2 <= 2.0 - 6.0 / r_exp;
      break;
    default:
      throw std::invalid_argument("check_summability: dim in {1,2,3}");
  }
  return s;
}

namespace {

double dual_norm(const space::Field& v, const space::Grid1D& grid,
                 const space::BoundaryCondition& bc, DualNorm X) {
  return X == DualNorm::L2 ? space::norm_L2(v, grid)
                           : space::norm_Hminus1(v, grid, bc);
}

double psi(double alpha, double omega, double t) {
  return alpha < 1.0 ? std::pow(t, -alpha) : std::exp(-omega * t);
}

}  // namespace

double check_decay_r(const SourceTerm& source, const fracops::TimeGrid& tgrid,
                     const space::Grid1D& grid,
                     const space::BoundaryCondition& bc, DualNorm X,
                     double alpha, double omega) {
  if (source.kind == SourceTerm::Kind::Series)
    return check_decay_r_series(source.samples, source.r_inf, tgrid, grid, bc,
                                X, alpha, omega);
  if (source.kind == SourceTerm::Kind::None || source.amplitude == 0.0)
    return 0.0;
  const double base = dual_norm(source.profile, grid, bc, X);
  double c_r = 0.0;
  for (std::size_t n = 1; n <= tgrid.steps(); ++n) {
    const double t = tgrid.t(n);
    const double m = source.modulation(t) * base;
    c_r = std::max(c_r, m * m / psi(alpha, omega, t));
  }
  return c_r;
}

double check_decay_r_series(const std::vector<space::Field>& r_series,
                            const space::Field& r_inf,
                            const fracops::TimeGrid& tgrid,
                            const space::Grid1D& grid,
                            const space::BoundaryCondition& bc, DualNorm X,
                            double alpha, double omega) {
  if (r_series.size() != tgrid.nodes().size())
    throw std::invalid_argument("check_decay_r_series: size mismatch");
  double c_r = 0.0;
  for (std::size_t n = 1; n <= tgrid.steps(); ++n) {
    space::Field diff = r_series[n];
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= r_inf[i];
    const double norm = dual_norm(diff, grid, bc, X);
    c_r = std::max(c_r, norm * norm / psi(alpha, omega, tgrid.t(n)));
  }
  return c_r;
}

double check_between_states(const space::Field& p, const space::Field& q,
                            const Nonlinearity& nl,
                            const std::vector<space::Field>& history,
                            const space::Field& u_inf,
                            std::size_t theta_count) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& u : history) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t k = 0; k <= theta_count; ++k) {
        const double theta = static_cast<double>(k) / theta_count;
        const double state = theta * u[i] + (1.0 - theta) * u_inf[i];
        margin = std::min(margin, p[i] * nl.fp(state) - q[i]);
      }
    }
  }
  return margin;
}

}  // namespace fracdecay::model
