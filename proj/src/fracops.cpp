#include "fracdecay/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracdecay::fracops {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("alpha must be in (0,1]");
}

}  // namespace

TimeGrid TimeGrid::uniform(double T, std::size_t steps) {
  return graded(T, steps, 1.0);
}

TimeGrid TimeGrid::graded(double T, std::size_t steps, double gamma) {
  if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: T must be positive");
  if (steps < 1) throw std::invalid_argument("TimeGrid: need at least 1 step");
  if (!(gamma >= 1.0)) throw std::invalid_argument("TimeGrid: gamma >= 1");
  std::vector<double> nodes(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j)
    nodes[j] = T * std::pow(static_cast<double>(j) / steps, gamma);
  nodes[steps] = T;
  return TimeGrid(std::move(nodes),
                  gamma == 1.0 ? MeshKind::Uniform : MeshKind::Graded, gamma);
}

CaputoWeights::CaputoWeights(TimeGrid grid, double alpha)
    : grid_(std::move(grid)), alpha_(alpha) {
  check_alpha(alpha);
  if (alpha_ < 1.0 && grid_.kind() == MeshKind::Uniform) {
    const std::size_t n = grid_.steps();
    uniform_b_.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      uniform_b_[k] = std::pow(static_cast<double>(k + 1), 1.0 - alpha_) -
                      std::pow(static_cast<double>(k), 1.0 - alpha_);
  }
}

void CaputoWeights::row(std::size_t n, std::vector<double>& out) const {
  if (n < 1 || n > grid_.steps())
    throw std::out_of_range("CaputoWeights::row: step index out of range");
  out.resize(n);
  if (alpha_ == 1.0) {
    std::fill(out.begin(), out.end(), 0.0);
    out[n - 1] = 1.0 / grid_.dt(n);
    return;
  }
  const double g = std::tgamma(2.0 - alpha_);
  if (!uniform_b_.empty()) {
    const double tau = grid_.dt(1);
    const double scale = std::pow(tau, -alpha_) / g;
    for (std::size_t j = 1; j <= n; ++j)
      out[j - 1] = scale * uniform_b_[n - j];
    return;
  }
  const double tn = grid_.t(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const double a = tn - grid_.t(j - 1);
    const double b = tn - grid_.t(j);
    out[j - 1] =
        (std::pow(a, 1.0 - alpha_) - std::pow(b, 1.0 - alpha_)) /
        (g * grid_.dt(j));
  }
}

double CaputoWeights::leading(std::size_t n) const {
  if (alpha_ == 1.0) return 1.0 / grid_.dt(n);
  return std::pow(grid_.dt(n), -alpha_) / std::tgamma(2.0 - alpha_);
}

double CaputoWeights::apply(std::span<const double> history,
                            std::size_t n) const {
  if (n > grid_.steps() || history.size() < n + 1)
    throw std::out_of_range("CaputoWeights::apply: step index out of range");
  if (n == 0) return 0.0;
  return history_term(history, n) +
         leading(n) * (history[n] - history[n - 1]);
}

double CaputoWeights::history_term(std::span<const double> history,
                                   std::size_t n) const {
  if (n > grid_.steps() || history.size() < n)
    throw std::out_of_range("CaputoWeights::history_term: out of range");
  if (n <= 1 || alpha_ == 1.0) return 0.0;
  const double g = std::tgamma(2.0 - alpha_);
  double acc = 0.0;
  if (!uniform_b_.empty()) {
    const double scale = std::pow(grid_.dt(1), -alpha_) / g;
    for (std::size_t j = 1; j < n; ++j)
      acc += uniform_b_[n - j] * (history[j] - history[j - 1]);
    return scale * acc;
  }
  const double tn = grid_.t(n);
  for (std::size_t j = 1; j < n; ++j) {
    const double a = tn - grid_.t(j - 1);
    const double b = tn - grid_.t(j);
    acc += (std::pow(a, 1.0 - alpha_) - std::pow(b, 1.0 - alpha_)) /
           (g * grid_.dt(j)) * (history[j] - history[j - 1]);
  }
  return acc;
}

std::vector<double> rl_convolve(double alpha, std::span<const double> series,
                                const TimeGrid& grid) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("rl_convolve: alpha in (0,1)");
  if (series.size() != grid.nodes().size())
    throw std::invalid_argument("rl_convolve: series/grid size mismatch");
  const std::size_t n_steps = grid.steps();
  std::vector<double> out(n_steps + 1, 0.0);
  const double inv_gamma_a = 1.0 / std::tgamma(alpha);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double tn = grid.t(n);
    double acc = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double a = tn - grid.t(j - 1);
      const double b = tn - grid.t(j);
      const double pa = std::pow(a, alpha);
      const double pb = std::pow(b, alpha);
      const double i0 = (pa - pb) / alpha;
      const double i1 = a * i0 - (pa * a - pb * b) / (alpha + 1.0);
      const double slope = (series[j] - series[j - 1]) / grid.dt(j);
      acc += series[j - 1] * i0 + slope * i1;
    }
    out[n] = acc * inv_gamma_a;
  }
  return out;
}

std::vector<double> coercivity_margins(const CaputoWeights& weights,
                                       std::span<const double> history) {
  const std::size_t n_steps = weights.grid().steps();
  if (history.size() != n_steps + 1)
    throw std::invalid_argument("coercivity_margins: size mismatch");
  std::vector<double> sq(history.size());
  for (std::size_t i = 0; i < history.size(); ++i)
    sq[i] = history[i] * history[i];
  std::vector<double> margins(n_steps + 1, 0.0);
  for (std::size_t n = 1; n <= n_steps; ++n)
    margins[n] =
        history[n] * weights.apply(history, n) - 0.5 * weights.apply(sq, n);
  return margins;
}

bool coercivity_check(const CaputoWeights& weights,
                      std::span<const double> history, double tol) {
  const auto margins = coercivity_margins(weights, history);
  return std::all_of(margins.begin(), margins.end(),
                     [tol](double m) { return m >= -tol; });
}

MaxPrincipleResult max_principle_check(const CaputoWeights& weights,
                                       std::span<const double> history,
                                       double tol) {
  const std::size_t n_steps = weights.grid().steps();
  if (history.size() != n_steps + 1)
    throw std::invalid_argument("max_principle_check: size mismatch");
  double vmax = history[0];
  for (double v : history) vmax = std::max(vmax, v);
  MaxPrincipleResult result{true, 0, 0.0};
  for (std::size_t n = 1; n <= n_steps; ++n) {
    if (history[n] == vmax) {
      const double c = weights.apply(history, n);
      result.argmax = n;  // ties resolve to the latest node
      result.caputo_at_argmax = c;
      if (c < -tol) result.pass = false;
    }
  }
  return result;
}

SoeKernel SoeKernel::build(double alpha, double delta, double horizon,
                           double rel_tol) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("SoeKernel: alpha in (0,1)");
  if (!(delta > 0.0 && horizon > delta))
    throw std::invalid_argument("SoeKernel: need 0 < delta < horizon");
  const double norm = 1.0 / (std::tgamma(alpha) * std::tgamma(1.0 - alpha));

  auto assemble = [&](double h, SoeKernel& k) {
    // k^alpha(t) = norm * int exp(alpha y - t e^y) dy, trapezoid in y;
    // truncation targets 0.05*rel_tol relative to k^alpha(horizon)
    const double y_lo =
        (std::log(0.05 * rel_tol * alpha) + std::lgamma(alpha) -
         alpha * std::log(horizon)) /
        alpha;
    const double y_hi =
        std::log((50.0 + 2.0 * std::log(1.0 / rel_tol)) / delta);
    const std::size_t count =
        static_cast<std::size_t>(std::ceil((y_hi - y_lo) / h)) + 1;
    k.weights.resize(count);
    k.rates.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double y = y_lo + h * static_cast<double>(i);
      k.rates[i] = std::exp(y);
      k.weights[i] = h * norm * std::exp(alpha * y);
    }
  };
  auto verify = [&](const SoeKernel& k) {
    double worst = 0.0;
    const double exact_scale = 1.0 / std::tgamma(1.0 - alpha);
    for (int i = 0; i < 240; ++i) {
      const double t = delta * std::pow(horizon / delta, i / 239.0);
      const double exact = std::pow(t, -alpha) * exact_scale;
      worst = std::max(worst, std::abs(k.eval(t) - exact) / exact);
    }
    return worst;
  };

  SoeKernel kernel;
  kernel.delta = delta;
  kernel.horizon = horizon;
  double h = 0.7;
  for (int attempt = 0; attempt < 6; ++attempt) {
    assemble(h, kernel);
    kernel.achieved_rel_error = verify(kernel);
    if (kernel.achieved_rel_error <= rel_tol) return kernel;
    h *= 0.5;
  }
  throw std::runtime_error("SoeKernel: tolerance not reached");
}

double SoeKernel::eval(double t) const {
  double s = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i)
    s += weights[i] * std::exp(-rates[i] * t);
  return s;
}

FastCaputo::FastCaputo(const TimeGrid& grid, double alpha,
                       std::size_t n_components, double rel_tol)
    : grid_(grid),
      alpha_(alpha),
      kernel_(SoeKernel::build(alpha, grid.dt(1), grid.horizon(), rel_tol)),
      state_(n_components * kernel_.rates.size(), 0.0),
      history_(n_components, 0.0),
      n_components_(n_components) {}

double FastCaputo::leading(std::size_t n) const {
  return std::pow(grid_.dt(n), -alpha_) / std::tgamma(2.0 - alpha_);
}

void FastCaputo::advance(std::size_t n, std::span<const double> values_prev,
                         std::span<const double> values_prev2) {
  if (n != last_step_ + 1)
    throw std::logic_error("FastCaputo::advance: steps must be sequential");
  last_step_ = n;
  std::fill(history_.begin(), history_.end(), 0.0);
  if (n == 1) return;
  const double tau_n = grid_.dt(n);
  const double tau_p = grid_.dt(n - 1);
  const std::size_t n_exp = kernel_.rates.size();
  for (std::size_t i = 0; i < n_exp; ++i) {
    const double lam = kernel_.rates[i];
    const double decay = std::exp(-lam * tau_n);
    const double panel = -std::expm1(-lam * tau_p) / (lam * tau_p);
    const double w = kernel_.weights[i];
    for (std::size_t c = 0; c < n_components_; ++c) {
      double& st = state_[c * n_exp + i];
      st = decay * (st + panel * (values_prev[c] - values_prev2[c]));
      history_[c] += w * st;
    }
  }
}

}  // namespace fracdecay::fracops
