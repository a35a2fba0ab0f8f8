#include "fracdecay/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracdecay/numerics.hpp"
#include "fracdecay/specialfn.hpp"

namespace fracdecay::gronwall {
namespace {

using fracops::TimeGrid;

// log-log cubic table of xi -> E_{a,a}(-c0 xi^a); the direct evaluation
// inside the O(N^2) panel loop would dominate the runtime
class MLTable {
 public:
  MLTable(double alpha, double c0, double xi_min, double xi_max,
          std::size_t count = 2048)
      : lo_(std::log(xi_min)), hi_(std::log(xi_max)), values_(count) {
    step_ = (hi_ - lo_) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
      const double xi = std::exp(lo_ + step_ * static_cast<double>(i));
      values_[i] =
          std::log(specialfn::mittag_leffler(alpha, alpha, c0 * std::pow(xi, alpha)));
    }
  }

  double eval(double xi) const {
    const double lx = std::clamp(std::log(xi), lo_, hi_);
    const double pos = (lx - lo_) / step_;
    const std::size_t n = values_.size();
    std::size_t i = std::min(static_cast<std::size_t>(pos), n - 2);
    const double u = pos - static_cast<double>(i);
    // Catmull-Rom in log-log, clamped at the table edges
    const double y0 = values_[i > 0 ? i - 1 : 0];
    const double y1 = values_[i];
    const double y2 = values_[i + 1];
    const double y3 = values_[std::min(i + 2, n - 1)];
    const double a0 = -0.5 * y0 + 1.5 * y1 - 1.5 * y2 + 0.5 * y3;
    const double a1 = y0 - 2.5 * y1 + 2.0 * y2 - 0.5 * y3;
    const double a2 = -0.5 * y0 + 0.5 * y2;
    return std::exp(((a0 * u + a1) * u + a2) * u + y1);
  }

 private:
  double lo_, hi_, step_;
  std::vector<double> values_;
};

// int_0^{t1} (tn - s)^{a-1} s^{-a} ds; exact Beta value when tn == t1,
// else smooth after s = t1 w^{1/(1-a)}.
double first_panel_power_weight(double alpha, double t1, double tn) {
  if (tn <= t1 * (1.0 + 1e-14)) {
    return 3.14159265358979323846 / std::sin(3.14159265358979323846 * alpha);
  }
  const double expo = 1.0 / (1.0 - alpha);
  auto g = [&](double w) {
    return std::pow(tn - t1 * std::pow(w, expo), alpha - 1.0);
  };
  const double integral =
      numerics::integrate_adaptive(g, 0.0, 1.0, 1e-12, 1e-300, 200);
  return std::pow(t1, 1.0 - alpha) / (1.0 - alpha) * integral;
}

std::vector<double> nu_alpha1(const MajorantSpec& spec, const TimeGrid& grid,
                              const std::vector<std::size_t>& nodes) {
  const double c0 = spec.c0;
  std::vector<double> out(nodes.size(), 0.0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::size_t n = nodes[k];
    const double tn = grid.t(n);
    double acc = std::exp(-c0 * tn) * spec.eta0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double phi_l = spec.phi.at_node(grid, j - 1, 1.0);
      const double phi_r = spec.phi.at_node(grid, j, 1.0);
      const double tau = grid.dt(j);
      const double slope = (phi_r - phi_l) / tau;
      const double el = std::exp(-c0 * (tn - grid.t(j - 1)));
      const double er = std::exp(-c0 * (tn - grid.t(j)));
      // int e^{-c0 (tn - s)} (phi_l + slope (s - t_{j-1})) ds, exact
      acc += phi_l * (er - el) / c0 +
             slope * (tau * er / c0 - (er - el) / (c0 * c0));
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

Forcing Forcing::constant(double phi0) {
  Forcing f;
  f.kind = Kind::Constant;
  f.phi0 = phi0;
  return f;
}

Forcing Forcing::power(double phi0) {
  Forcing f;
  f.kind = Kind::Power;
  f.phi0 = phi0;
  return f;
}

Forcing Forcing::exponential(double phi0, double c1) {
  Forcing f;
  f.kind = Kind::Exponential;
  f.phi0 = phi0;
  f.c1 = c1;
  return f;
}

Forcing Forcing::sampled(std::vector<double> values) {
  Forcing f;
  f.kind = Kind::Series;
  f.series = std::move(values);
  return f;
}

double Forcing::value(double t, double alpha) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return phi0;
    case Kind::Power:
      return phi0 * std::pow(t, -alpha);
    case Kind::Exponential:
      return phi0 * std::exp(-c1 * t);
    case Kind::Series:
      throw std::logic_error("Forcing: sampled forcing has no closed form");
  }
  return 0.0;
}

double Forcing::at_node(const TimeGrid& grid, std::size_t n,
                        double alpha) const {
  if (kind == Kind::Series) {
    if (series.size() != grid.nodes().size())
      throw std::invalid_argument("Forcing: series size mismatch");
    return series[n];
  }
  if (kind == Kind::Power && n == 0) return 0.0;  // never integrated directly
  return value(grid.t(n), alpha);
}

std::vector<double> nu_majorant_at(const MajorantSpec& spec,
                                   const TimeGrid& grid,
                                   const std::vector<std::size_t>& nodes,
                                   EFreeze freeze) {
  if (!(spec.c0 > 0.0)) throw std::invalid_argument("MajorantSpec: c0 > 0");
  if (!(spec.eta0 >= 0.0)) throw std::invalid_argument("MajorantSpec: eta0 >= 0");
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0))
    throw std::invalid_argument("MajorantSpec: alpha in (0,1]");
  if (spec.alpha == 1.0) {
    if (spec.phi.kind == Forcing::Kind::Power)
      throw std::invalid_argument("nu_majorant: power forcing needs alpha < 1");
    return nu_alpha1(spec, grid, nodes);
  }
  const double alpha = spec.alpha, c0 = spec.c0;
  const bool power = spec.phi.kind == Forcing::Kind::Power;
  const bool zero = spec.phi.kind == Forcing::Kind::Zero;

  MLTable table(alpha, c0, 0.25 * grid.dt(1), grid.horizon() * 1.0001);
  std::vector<double> out(nodes.size(), 0.0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::size_t n = nodes[k];
    const double tn = grid.t(n);
    double acc =
        specialfn::mittag_leffler(alpha, 1.0, c0 * std::pow(tn, alpha)) *
        spec.eta0;
    if (!zero) {
      for (std::size_t j = 1; j <= n; ++j) {
        const double tl = grid.t(j - 1), tr = grid.t(j);
        const double frozen_at =
            freeze == EFreeze::Midpoint ? tn - 0.5 * (tl + tr) : tn - tr;
        const double e_val = frozen_at <= 0.0
                                 ? 1.0 / std::tgamma(alpha)
                                 : table.eval(frozen_at);
        if (power && j == 1) {
          acc += e_val * spec.phi.phi0 *
                 first_panel_power_weight(alpha, tr, tn);
          continue;
        }
        const double a = tn - tl, b = tn - tr;
        const double pa = std::pow(a, alpha), pb = std::pow(b, alpha);
        const double i0 = (pa - pb) / alpha;
        const double i1 = a * i0 - (pa * a - pb * b) / (alpha + 1.0);
        const double phi_l = spec.phi.at_node(grid, j - 1, alpha);
        const double phi_r = spec.phi.at_node(grid, j, alpha);
        const double slope = (phi_r - phi_l) / grid.dt(j);
        acc += e_val * (phi_l * i0 + slope * i1);
      }
    }
    out[k] = acc;
  }
  return out;
}

std::vector<double> nu_majorant(const MajorantSpec& spec, const TimeGrid& grid,
                                EFreeze freeze) {
  std::vector<std::size_t> nodes(grid.nodes().size());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = i;
  auto vals = nu_majorant_at(spec, grid, nodes, freeze);
  vals[0] = spec.eta0;
  return vals;
}

MajorizationReport check_majorization(const std::vector<double>& eta,
                                      const MajorantSpec& spec,
                                      const TimeGrid& grid, EFreeze freeze) {
  if (eta.size() != grid.nodes().size())
    throw std::invalid_argument("check_majorization: size mismatch");
  const auto nu = nu_majorant(spec, grid, freeze);
  MajorizationReport report{true, -std::numeric_limits<double>::infinity(), 0};
  for (std::size_t n = 0; n < eta.size(); ++n) {
    const double gap = eta[n] - nu[n];
    if (gap > report.worst_gap) {
      report.worst_gap = gap;
      report.worst_node = n;
    }
    if (eta[n] > nu[n] * (1.0 + 1e-6) + 1e-12) report.pass = false;
  }
  return report;
}

double c_of_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("c_of_alpha: alpha in (0,1)");
  const double c_a = specialfn::c_alpha_sup(alpha);
  // int_{1/2}^1 s^{a-1}(1-s)^{-a} ds becomes a bounded smooth integrand
  // under 1 - s = w^{1/(1-a)}
  const double expo = 1.0 / (1.0 - alpha);
  auto g = [&](double w) {
    return std::pow(1.0 - std::pow(w, expo), alpha - 1.0);
  };
  const double upper = std::pow(0.5, 1.0 - alpha);
  const double integral =
      numerics::integrate_adaptive(g, 0.0, upper, 1e-12, 1e-300) /
      (1.0 - alpha);
  return std::pow(2.0, alpha) * (1.0 + alpha + c_a * integral);
}

PowerBound power_decay_bound(const MajorantSpec& spec, const TimeGrid& grid) {
  if (spec.phi.kind != Forcing::Kind::Power &&
      spec.phi.kind != Forcing::Kind::Zero)
    throw std::invalid_argument("power_decay_bound: power forcing required");
  const double alpha = spec.alpha;
  const double K = std::tgamma(1.0 + alpha) * std::pow(spec.c0, -alpha) *
                       spec.eta0 +
                   spec.phi.phi0 * c_of_alpha(alpha) / spec.c0;
  const auto nu = nu_majorant(spec, grid);
  PowerBound out{K, true, 0.0};
  for (std::size_t n = 1; n < nu.size(); ++n) {
    const double bound = K * std::pow(grid.t(n), -alpha);
    if (K > 0.0) out.worst_ratio = std::max(out.worst_ratio, nu[n] / bound);
    if (nu[n] > bound * (1.0 + 1e-9) + 1e-300) out.holds = false;
  }
  return out;
}

ExpBound exp_decay_bound(const MajorantSpec& spec, const TimeGrid& grid) {
  if (spec.alpha != 1.0)
    throw std::invalid_argument("exp_decay_bound: alpha = 1 required");
  if (spec.phi.kind != Forcing::Kind::Exponential &&
      spec.phi.kind != Forcing::Kind::Zero)
    throw std::invalid_argument("exp_decay_bound: exponential forcing required");
  if (spec.phi.kind == Forcing::Kind::Exponential && !(spec.phi.c1 > spec.c0))
    throw std::invalid_argument("exp_decay_bound: c1 > c0 required");
  const double coef =
      spec.eta0 + (spec.phi.kind == Forcing::Kind::Exponential
                       ? spec.phi.phi0 / (spec.phi.c1 - spec.c0)
                       : 0.0);
  const auto nu = nu_majorant(spec, grid);
  ExpBound out{coef, true, 0.0};
  for (std::size_t n = 0; n < nu.size(); ++n) {
    const double bound = coef * std::exp(-spec.c0 * grid.t(n));
    if (coef > 0.0) out.worst_ratio = std::max(out.worst_ratio, nu[n] / bound);
    if (nu[n] > bound * (1.0 + 1e-9) + 1e-300) out.holds = false;
  }
  return out;
}

BarrierReport barrier_implication(const std::vector<double>& eta,
                                  const std::function<double(double)>& Phi,
                                  double c2, double alpha,
                                  const TimeGrid& grid) {
  if (eta.size() != grid.nodes().size())
    throw std::invalid_argument("barrier_implication: size mismatch");
  const double envelope =
      eta[0] + c2 / (std::tgamma(alpha) * alpha * (1.0 - alpha));
  BarrierReport report{BarrierStatus::Pass, Phi(envelope), 0};
  if (!(report.premise_value < 1.0)) {
    report.status = BarrierStatus::PremiseNotMet;
    return report;
  }
  for (std::size_t n = 0; n < eta.size(); ++n) {
    if (Phi(eta[n]) > 1.0) {
      report.status = BarrierStatus::Violated;
      report.first_violation = n;
      return report;
    }
  }
  return report;
}

Eta01Report eta01_rates(const std::vector<double>& eta0,
                        const std::vector<double>& eta1, double c0, double c1,
                        double C, double beta, double alpha,
                        const TimeGrid& grid) {
  const std::size_t n_nodes = grid.nodes().size();
  if (eta0.size() != n_nodes || eta1.size() != n_nodes)
    throw std::invalid_argument("eta01_rates: size mismatch");
  Eta01Report report;
  fracops::CaputoWeights weights(grid, alpha);

  // premise check with a small relative slack for discretization noise
  report.premise_ok = true;
  for (std::size_t n = 1; n < n_nodes; ++n) {
    const double lhs =
        weights.apply(eta0, n) + c0 * eta0[n] + c1 * eta1[n];
    const double rhs = alpha < 1.0
                           ? C * std::pow(grid.t(n), -beta)
                           : C * std::exp(-c0 * grid.t(n));
    if (lhs > rhs * (1.0 + 1e-6) + 1e-9) {
      report.premise_ok = false;
      report.note = "premise violated at node " + std::to_string(n);
      return report;
    }
  }

  if (alpha == 1.0) {
    // exponential variant: eta0(t) <= (eta0(0) + C t) e^{-c0 t}
    report.rate_ok0 = true;
    for (std::size_t n = 0; n < n_nodes; ++n) {
      const double bound =
          (eta0[0] + C * grid.t(n)) * std::exp(-c0 * grid.t(n));
      if (eta0[n] > bound * (1.0 + 1e-9) + 1e-12) report.rate_ok0 = false;
    }
    // eta1 decays at some positive rate below c0; sparse (spiky) series are
    // fitted across every positive node
    std::vector<double> ts, ys;
    for (std::size_t n = 1; n < n_nodes; ++n) {
      if (eta1[n] <= 1e-14) continue;
      ts.push_back(grid.t(n));
      ys.push_back(std::log(eta1[n]));
    }
    if (ts.size() >= 5) {
      const auto fit = numerics::fit_line(ts, ys);
      report.slope1 = -fit.slope;
      report.rate_ok1 = fit.slope < 0.0;
    } else {
      report.rate_ok1 = true;  // eta1 at the noise floor
      report.note = "eta1 at floor, exponential fit skipped";
    }
    return report;
  }

  const double target = std::min(alpha, beta);
  const double c0j[2] = {c0, c1};
  const std::vector<double>* etas[2] = {&eta0, &eta1};
  const double cn = C * std::tgamma(1.0 - beta) + eta0[0];
  for (int j = 0; j < 2; ++j) {
    // last decade of the grid, at least 10 points
    std::vector<double> lt, ly;
    double sup_coef = 0.0;
    const double t_lo = grid.horizon() / 10.0;
    for (std::size_t n = 1; n < n_nodes; ++n) {
      if (grid.t(n) < t_lo) continue;
      const double v = (*etas[j])[n];
      sup_coef = std::max(sup_coef, v * std::pow(grid.t(n), target));
      if (v > 0.0) {
        lt.push_back(std::log(grid.t(n)));
        ly.push_back(std::log(v));
      }
    }
    const double slope =
        lt.size() >= 10 ? numerics::fit_line(lt, ly).slope : 0.0;
    const double bound = 1.5 * cn / c0j[j];
    if (j == 0) {
      report.slope0 = slope;
      report.coef0 = sup_coef;
      report.bound0 = bound;
      report.rate_ok0 = lt.size() >= 10 && slope <= -target + 0.2;
      report.coef_ok0 = sup_coef <= bound;
    } else {
      report.slope1 = slope;
      report.coef1 = sup_coef;
      report.bound1 = bound;
      report.rate_ok1 = lt.size() >= 10 && slope <= -target + 0.2;
      report.coef_ok1 = sup_coef <= bound;
    }
  }
  return report;
}

std::vector<double> solve_fractional_ode(double alpha, double c0,
                                         const Forcing& phi, double eta0,
                                         const TimeGrid& grid) {
  fracops::CaputoWeights weights(grid, alpha);
  std::vector<double> eta(grid.nodes().size(), 0.0);
  eta[0] = eta0;
  for (std::size_t n = 1; n < eta.size(); ++n) {
    const double lead = weights.leading(n);
    const double hist = weights.history_term(eta, n);
    eta[n] = (lead * eta[n - 1] - hist + phi.at_node(grid, n, alpha)) /
             (lead + c0);
  }
  return eta;
}

std::vector<double> solve_fractional_ode_fast(double alpha, double c0,
                                              const Forcing& phi, double eta0,
                                              const TimeGrid& grid,
                                              double soe_tol) {
  if (alpha == 1.0) return solve_fractional_ode(alpha, c0, phi, eta0, grid);
  fracops::FastCaputo fast(grid, alpha, 1, soe_tol);
  std::vector<double> eta(grid.nodes().size(), 0.0);
  eta[0] = eta0;
  for (std::size_t n = 1; n < eta.size(); ++n) {
    const double prev = eta[n - 1];
    const double prev2 = n >= 2 ? eta[n - 2] : 0.0;
    fast.advance(n, {&prev, 1}, {&prev2, 1});
    const double lead = fast.leading(n);
    eta[n] = (lead * eta[n - 1] - fast.history_term(0) +
              phi.at_node(grid, n, alpha)) /
             (lead + c0);
  }
  return eta;
}

}  // namespace fracdecay::gronwall
