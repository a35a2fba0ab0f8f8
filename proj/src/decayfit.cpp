#include "fracdecay/decayfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracdecay/numerics.hpp"

namespace fracdecay::decayfit {
namespace {

const char* status_name(Status s) {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Fail:
      return "fail";
    case Status::Abstain:
      return "abstain";
  }
  return "?";
}

FitResult fit_log(const std::vector<double>& series,
                  const fracops::TimeGrid& tgrid, Window window,
                  double floor_abs, double t_shift, bool log_abscissa) {
  FitResult out;
  window.i1 = std::min(window.i1, series.size() - 1);
  out.window = window;
  // truncate at the first node that falls below the floor
  std::size_t end = window.i1;
  for (std::size_t n = window.i0; n <= window.i1; ++n) {
    if (series[n] < floor_abs) {
      if (n == window.i0) {
        out.at_floor = true;
        double peak = 0.0;
        for (std::size_t m = window.i0; m <= window.i1; ++m)
          peak = std::max(peak, series[m]);
        out.at_floor = peak < floor_abs;
      }
      end = n == window.i0 ? window.i0 : n - 1;
      out.floored = true;
      break;
    }
  }
  if (out.at_floor) {
    out.note = "series below the fit floor across the window";
    return out;
  }
  std::vector<double> xs, ys;
  for (std::size_t n = window.i0; n <= end; ++n) {
    const double t = tgrid.t(n) - t_shift;
    if (t <= 0.0) continue;
    if (series[n] <= 0.0) {
      out.note = "nonpositive value inside the fit window";
      return out;
    }
    xs.push_back(log_abscissa ? std::log(t) : t);
    ys.push_back(std::log(series[n]));
  }
  if (xs.size() < 2) {
    out.note = "fit window too small";
    return out;
  }
  const auto fit = numerics::fit_line(xs, ys);
  out.ok = true;
  out.exponent = -fit.slope;
  out.C = std::exp(fit.intercept);
  out.r2 = fit.r2;
  out.window.i1 = end;
  return out;
}

Verdict make(const std::string& claim, Status s, double margin, double fitted,
             double tol, std::string note = {}) {
  return Verdict{claim, s, margin, fitted, tol, std::move(note)};
}

}  // namespace

Window last_decade(const fracops::TimeGrid& tgrid, std::size_t min_points) {
  const std::size_t last = tgrid.steps();
  const double t_lo = tgrid.horizon() / 10.0;
  std::size_t i0 = last;
  for (std::size_t n = 1; n <= last; ++n) {
    if (tgrid.t(n) >= t_lo) {
      i0 = n;
      break;
    }
  }
  if (last + 1 > min_points && i0 > last + 1 - min_points)
    i0 = last + 1 - min_points;
  if (i0 < 1) i0 = 1;
  return {i0, last};
}

FitResult fit_power(const std::vector<double>& series,
                    const fracops::TimeGrid& tgrid, Window window,
                    double floor_abs, double t_shift) {
  return fit_log(series, tgrid, window, floor_abs, t_shift, true);
}

FitResult fit_exponential(const std::vector<double>& series,
                          const fracops::TimeGrid& tgrid, Window window,
                          double floor_abs, double t_shift) {
  return fit_log(series, tgrid, window, floor_abs, t_shift, false);
}

bool DecayReport::all_pass() const { return !has_fail(); }

bool DecayReport::has_fail() const {
  return std::any_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) {
    return v.status == Status::Fail;
  });
}

std::string DecayReport::text() const {
  std::ostringstream os;
  os.precision(6);
  os << "regime=" << regime << " fitted_exponent=" << fitted_exponent
     << " C=" << C << " r2=" << r2 << " window=[" << window.i0 << ","
     << window.i1 << "]\n";
  for (const auto& v : verdicts) {
    os << "  " << v.claim << ": " << status_name(v.status)
       << " margin=" << v.margin << " fitted=" << v.fitted
       << " tolerance=" << v.tolerance;
    if (!v.note.empty()) os << " (" << v.note << ")";
    os << "\n";
  }
  return os.str();
}

std::string DecayReport::csv() const {
  std::ostringstream os;
  os << "claim_id,status,margin,fitted_value,tolerance\n";
  os.precision(17);
  for (const auto& v : verdicts)
    os << v.claim << ',' << status_name(v.status) << ',' << v.margin << ','
       << v.fitted << ',' << v.tolerance << '\n';
  return os.str();
}

DecayReport verify_decay_theorem(const RunBundle& run, int s,
                                 evolve::Regime regime) {
  DecayReport report;
  const double alpha = run.prob->alpha;
  report.regime = alpha < 1.0 ? "power" : "exponential";

  std::string blocker;
  if (!run.growth_ok) blocker = "growth condition not verified";
  if (regime == evolve::Regime::Lo && !run.summability.lo)
    blocker = "summability (lo) fails";
  if (regime != evolve::Regime::Lo && !run.summability.hi)
    blocker = "summability (hi) fails";
  if (!(run.margin > 0.0)) blocker = "sign-condition margin not positive";
  if (!std::isfinite(run.C_r)) blocker = "forcing decay constant not finite";
  if (!run.history->ok()) blocker = "transient solve failed: " +
                                    run.history->message;
  if (!blocker.empty()) {
    for (const char* claim : {"V1_bound", "V2_rate", "V3_barrier",
                              "V4_tauberian"})
      report.verdicts.push_back(
          make(claim, Status::Abstain, 0.0, 0.0, 0.0, blocker));
    return report;
  }

  const auto& trace = *run.trace;
  // V1: per-step bound (alpha < 1 statement)
  if (alpha < 1.0) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < trace.bound_lhs.size(); ++n)
      worst = std::min(worst, trace.bound_rhs[n] - trace.bound_lhs[n]);
    report.verdicts.push_back(make("V1_bound",
                                   trace.bound_holds() ? Status::Pass
                                                       : Status::Fail,
                                   worst, 0.0, 0.0));
  } else {
    report.verdicts.push_back(make("V1_bound", Status::Abstain, 0.0, 0.0, 0.0,
                                   "bound is an alpha<1 statement"));
  }

  // V2: fitted decay rate of ||usim||_{H^s}^2
  const auto& series = s == 0 ? trace.l2_sq : trace.h1_sq;
  const auto window = last_decade(run.history->tgrid);
  if (alpha < 1.0) {
    auto fit = fit_power(series, run.history->tgrid, window);
    report.fitted_exponent = fit.exponent;
    report.C = fit.C;
    report.r2 = fit.r2;
    report.window = fit.window;
    const double tol = alpha - 0.15;
    if (fit.ok) {
      report.verdicts.push_back(make("V2_rate",
                                     fit.exponent >= tol ? Status::Pass
                                                         : Status::Fail,
                                     fit.exponent - tol, fit.exponent, tol));
    } else if (fit.at_floor) {
      report.verdicts.push_back(make("V2_rate", Status::Pass, 0.0, 0.0, tol,
                                     "series already at the floor"));
    } else {
      report.verdicts.push_back(
          make("V2_rate", Status::Abstain, 0.0, 0.0, tol, fit.note));
    }
  } else {
    auto fit = fit_exponential(series, run.history->tgrid, window);
    report.fitted_exponent = fit.exponent;
    report.C = fit.C;
    report.r2 = fit.r2;
    report.window = fit.window;
    if (fit.ok) {
      report.verdicts.push_back(make("V2_rate",
                                     fit.exponent > 0.0 ? Status::Pass
                                                        : Status::Fail,
                                     fit.exponent, fit.exponent, 0.0));
    } else if (fit.at_floor) {
      report.verdicts.push_back(make("V2_rate", Status::Pass, 0.0, 0.0, 0.0,
                                     "series already at the floor"));
    } else {
      report.verdicts.push_back(
          make("V2_rate", Status::Abstain, 0.0, 0.0, 0.0, fit.note));
    }
  }

  // V3: barrier latch
  {
    double worst = std::numeric_limits<double>::infinity();
    if (regime == evolve::Regime::Between) {
      const double cap = 0.5 * trace.constants.mu_between *
                         std::min(0.5 * trace.constants.margin,
                                  trace.constants.c_D);
      for (double d : trace.D_between) worst = std::min(worst, cap - d);
    } else {
      for (double d : (s == 0 ? trace.D0 : trace.D1))
        worst = std::min(worst, 0.5 - d);
    }
    report.verdicts.push_back(make("V3_barrier",
                                   trace.barrier_ever_tripped()
                                       ? Status::Fail
                                       : Status::Pass,
                                   worst, 0.0, 0.0));
  }

  // V4: Tauberian tail rate
  if (alpha < 1.0) {
    const auto& high = s == 0 ? trace.h1_sq : trace.h2_sq;
    std::vector<double> v4(high.size(), 0.0);
    for (std::size_t n = 0; n < v4.size(); ++n) {
      const double r = run.tds->resid_norm_sm1[n];
      v4[n] = r * r + high[n];
    }
    auto fit = fit_power(v4, run.history->tgrid, window);
    const double tol = alpha - 0.2;
    if (fit.ok) {
      report.verdicts.push_back(make("V4_tauberian",
                                     fit.exponent >= tol ? Status::Pass
                                                         : Status::Fail,
                                     fit.exponent - tol, fit.exponent, tol));
    } else if (fit.at_floor) {
      report.verdicts.push_back(make("V4_tauberian", Status::Pass, 0.0, 0.0,
                                     tol, "series already at the floor"));
    } else {
      report.verdicts.push_back(
          make("V4_tauberian", Status::Abstain, 0.0, 0.0, tol, fit.note));
    }
  } else {
    report.verdicts.push_back(make("V4_tauberian", Status::Abstain, 0.0, 0.0,
                                   0.0, "alpha<1 statement"));
  }
  return report;
}

SmallnessTable smallness_probe(const model::Problem& base,
                               const space::Field& u_inf,
                               const std::vector<double>& radii,
                               const space::Field& unit_profile,
                               evolve::Regime regime) {
  SmallnessTable table;
  for (double radius : radii) {
    model::Problem prob = base;
    prob.u0.resize(prob.grid.nx);
    for (std::size_t i = 0; i < prob.grid.nx; ++i)
      prob.u0[i] = u_inf[i] + radius * unit_profile[i];
    if (prob.bc.kind == space::BcKind::Dirichlet) {
      prob.u0.front() = prob.bc.left;
      prob.u0.back() = prob.bc.right;
    }
    auto history = evolve::solve_transient(prob);
    SmallnessRow row{radius, false, {}};
    if (!history.ok()) {
      row.detail = history.message;
      table.rows.push_back(row);
      continue;
    }
    const double C_r = model::check_decay_r(
        prob.source, prob.tgrid, prob.grid, prob.bc,
        regime == evolve::Regime::Lo ? model::DualNorm::Hminus1
                                     : model::DualNorm::L2,
        prob.alpha, prob.source.rate);
    auto trace = evolve::monitor_energy(history, prob, u_inf, regime, C_r);
    const int s = regime == evolve::Regime::Lo ? 0 : 1;
    auto tds = evolve::time_derivative_series(history, prob, u_inf, s);
    RunBundle bundle;
    bundle.prob = &prob;
    bundle.history = &history;
    bundle.u_inf = &u_inf;
    bundle.trace = &trace;
    bundle.tds = &tds;
    bundle.C_r = C_r;
    bundle.margin = trace.constants.margin;
    bundle.growth_ok =
        model::check_growth(prob.nl, -8.0, 8.0, 1001).pass;
    bundle.summability =
        model::check_summability(1, prob.r_exp, prob.nl.growth.kappa2);
    auto report = verify_decay_theorem(bundle, s, regime);
    bool rate_passed = false;
    for (const auto& v : report.verdicts)
      if (v.claim == "V2_rate") rate_passed = v.status == Status::Pass;
    row.pass = !report.has_fail() && rate_passed;
    row.detail = report.text();
    table.rows.push_back(row);
  }
  for (const auto& row : table.rows)
    if (row.pass) table.largest_passing = std::max(table.largest_passing,
                                                   row.radius);
  return table;
}

DecayReport verify_ut_theorem(const RunBundle& run, double t0) {
  DecayReport report;
  const double alpha = run.prob->alpha;
  const double beta = run.beta_rt;
  report.regime = alpha < 1.0 ? "power" : "exponential";
  const auto& tds = *run.tds;
  const auto& tgrid = run.history->tgrid;
  const std::size_t last = run.history->last_step();

  // (utinit) heuristic: discrete u_t must not diverge toward t = 0
  bool ut0_finite = true;
  {
    std::vector<double> lt, lv;
    for (std::size_t n = 1; n <= std::min<std::size_t>(8, last); ++n) {
      if (tds.ut_l2[n] <= 0.0) continue;
      lt.push_back(std::log(tgrid.t(n)));
      lv.push_back(std::log(tds.ut_l2[n]));
    }
    if (lt.size() >= 4 && numerics::fit_line(lt, lv).slope < -0.25)
      ut0_finite = false;
  }
  if (!ut0_finite) {
    for (const char* claim : {"ut_a", "ut_b", "ut_c"})
      report.verdicts.push_back(
          make(claim, Status::Abstain, 0.0, 0.0, 0.0,
               "u_t(0) not finite in the discrete norm; (utinit) cannot be "
               "bootstrapped from the PDE"));
    return report;
  }

  std::vector<double> ut_h1_sq(last + 1, 0.0), ut_h2_sq(last + 1, 0.0);
  for (std::size_t n = 0; n <= last; ++n) {
    ut_h1_sq[n] = tds.ut_h1[n] * tds.ut_h1[n];
    ut_h2_sq[n] = tds.ut_h2[n] * tds.ut_h2[n];
  }

  // clause (a): alpha = 1, r_t in L2 with vanishing tail
  if (alpha == 1.0 && run.rt_square_integrable) {
    const double head = tds.ut_h1[1];
    const double tail = tds.ut_h1[last];
    report.verdicts.push_back(make("ut_a",
                                   tail <= 1e-3 * head ? Status::Pass
                                                       : Status::Fail,
                                   1e-3 * head - tail, tail, 1e-3 * head));
  } else {
    report.verdicts.push_back(make(
        "ut_a", Status::Abstain, 0.0, 0.0, 0.0,
        alpha == 1.0 ? "r_t class not declared" : "alpha=1 statement"));
  }

  // fit window measured from t0
  Window window = last_decade(tgrid);
  while (window.i0 <= last && tgrid.t(window.i0) <= t0) ++window.i0;

  // clause (b): power slope of ||u_t||_{H^2}^2 from t0
  {
    const double target = std::min(alpha, beta);
    auto fit = fit_power(ut_h2_sq, tgrid, window, 1e-12, t0);
    const double tol = target - 0.2;
    if (fit.ok) {
      report.verdicts.push_back(make("ut_b",
                                     fit.exponent >= tol ? Status::Pass
                                                         : Status::Fail,
                                     fit.exponent - tol, fit.exponent, tol));
      report.fitted_exponent = fit.exponent;
      report.r2 = fit.r2;
      report.window = fit.window;
    } else if (fit.at_floor) {
      report.verdicts.push_back(make("ut_b", Status::Pass, 0.0, 0.0, tol,
                                     "series already at the floor"));
    } else {
      report.verdicts.push_back(
          make("ut_b", Status::Abstain, 0.0, 0.0, tol, fit.note));
    }
  }

  // clause (c): exponential rate at alpha = 1, power rate otherwise
  if (alpha == 1.0) {
    auto fit = fit_exponential(ut_h2_sq, tgrid, window, 1e-12, t0);
    if (fit.ok) {
      report.verdicts.push_back(make("ut_c",
                                     fit.exponent > 0.0 ? Status::Pass
                                                        : Status::Fail,
                                     fit.exponent, fit.exponent, 0.0));
      report.fitted_exponent = fit.exponent;
      report.C = fit.C;
      report.r2 = fit.r2;
    } else if (fit.at_floor) {
      report.verdicts.push_back(make("ut_c", Status::Pass, 0.0, 0.0, 0.0,
                                     "series already at the floor"));
    } else {
      report.verdicts.push_back(
          make("ut_c", Status::Abstain, 0.0, 0.0, 0.0, fit.note));
    }
  } else {
    auto fit = fit_power(ut_h2_sq, tgrid, window, 1e-12, t0);
    const double tol = alpha - 0.2;
    if (fit.ok) {
      report.verdicts.push_back(make("ut_c",
                                     fit.exponent >= tol ? Status::Pass
                                                         : Status::Fail,
                                     fit.exponent - tol, fit.exponent, tol));
    } else if (fit.at_floor) {
      report.verdicts.push_back(make("ut_c", Status::Pass, 0.0, 0.0, tol,
                                     "series already at the floor"));
    } else {
      report.verdicts.push_back(
          make("ut_c", Status::Abstain, 0.0, 0.0, tol, fit.note));
    }
  }
  return report;
}

}  // namespace fracdecay::decayfit
