#include "fracdecay/space.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fracdecay::space {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> trapezoid_weights(const Grid1D& grid) {
  std::vector<double> w(grid.nx, grid.h());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

}  // namespace

Grid1D Grid1D::make(double a, double b, std::size_t nx) {
  if (!(a < b)) throw std::invalid_argument("Grid1D: need a < b");
  if (nx < 3) throw std::invalid_argument("Grid1D: need nx >= 3");
  return Grid1D{a, b, nx};
}

Field Tridiag::apply(const Field& v) const {
  const std::size_t n = size();
  Field out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * v[i];
    if (i > 0) s += lower[i] * v[i - 1];
    if (i + 1 < n) s += upper[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

bool Tridiag::solve(const Field& rhs, Field& out,
                    std::size_t* singular_node) const {
  const std::size_t n = size();
  std::vector<double> c(n, 0.0), d(n, 0.0);
  double piv = diag[0];
  if (std::abs(piv) < 1e-300) {
    if (singular_node) *singular_node = 0;
    return false;
  }
  c[0] = upper[0] / piv;
  d[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - lower[i] * c[i - 1];
    if (std::abs(piv) < 1e-300 || !std::isfinite(piv)) {
      if (singular_node) *singular_node = i;
      return false;
    }
    c[i] = (i + 1 < n ? upper[i] : 0.0) / piv;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
  }
  out.assign(n, 0.0);
  out[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) out[i] = d[i] - c[i] * out[i + 1];
  return true;
}

EllipticOp::EllipticOp(Field diffusion, Field reaction, BoundaryCondition bc,
                       Grid1D grid)
    : diffusion_(std::move(diffusion)),
      reaction_(std::move(reaction)),
      bc_(bc),
      grid_(grid) {
  if (diffusion_.size() != grid_.nx || reaction_.size() != grid_.nx)
    throw std::invalid_argument("EllipticOp: field size mismatch");
  const double dmin = *std::min_element(diffusion_.begin(), diffusion_.end());
  if (!(dmin > 0.0))
    throw std::invalid_argument("EllipticOp: ellipticity violated, min D <= 0");
  const double rmin = *std::min_element(reaction_.begin(), reaction_.end());
  if (rmin < 0.0)
    throw std::invalid_argument("EllipticOp: reaction coefficient d < 0");

  const std::size_t n = grid_.nx;
  const double h2 = grid_.h() * grid_.h();
  system_.lower.assign(n, 0.0);
  system_.diag.assign(n, 0.0);
  system_.upper.assign(n, 0.0);
  auto half = [&](std::size_t i) {
    return 0.5 * (diffusion_[i] + diffusion_[i + 1]);
  };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dl = half(i - 1), dr = half(i);
    system_.lower[i] = -dl / h2;
    system_.diag[i] = (dl + dr) / h2 + reaction_[i];
    system_.upper[i] = -dr / h2;
  }
  if (bc_.kind == BcKind::Dirichlet) {
    system_.diag[0] = 1.0;
    system_.diag[n - 1] = 1.0;
  } else {
    // ghost-node elimination of the second-order normal-derivative rows
    const double cl = diffusion_[0] + half(0);
    system_.diag[0] = cl / h2 + reaction_[0];
    system_.upper[0] = -cl / h2;
    const double cr = diffusion_[n - 1] + half(n - 2);
    system_.diag[n - 1] = cr / h2 + reaction_[n - 1];
    system_.lower[n - 1] = -cr / h2;
  }
}

double EllipticOp::neumann_rhs_shift(bool left_end) const {
  if (bc_.kind != BcKind::Neumann) return 0.0;
  const double h = grid_.h();
  if (left_end) return 2.0 * diffusion_.front() * bc_.left / h;
  return 2.0 * diffusion_.back() * bc_.right / h;
}

Field EllipticOp::apply_interior(const Field& v) const {
  const std::size_t n = grid_.nx;
  if (v.size() != n)
    throw std::invalid_argument("EllipticOp::apply_interior: size mismatch");
  const double h2 = grid_.h() * grid_.h();
  auto half = [&](std::size_t i) {
    return 0.5 * (diffusion_[i] + diffusion_[i + 1]);
  };
  Field out(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dl = half(i - 1), dr = half(i);
    out[i] = (-dl * v[i - 1] + (dl + dr) * v[i] - dr * v[i + 1]) / h2 +
             reaction_[i] * v[i];
  }
  // one-sided flux closures, same footprint as the H^2 seminorm
  out[0] = (half(0) * (v[0] - v[1]) - half(1) * (v[1] - v[2])) / h2 +
           reaction_[0] * v[0];
  out[n - 1] = (half(n - 2) * (v[n - 1] - v[n - 2]) -
                half(n - 3) * (v[n - 2] - v[n - 3])) /
                   h2 +
               reaction_[n - 1] * v[n - 1];
  return out;
}

double EllipticOp::min_diffusion() const {
  return *std::min_element(diffusion_.begin(), diffusion_.end());
}

double norm_Lp(const Field& v, double p, const Grid1D& grid) {
  if (v.size() != grid.nx) throw std::invalid_argument("norm_Lp: size mismatch");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("norm_Lp: p >= 1 required");
  const auto w = trapezoid_weights(grid);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += w[i] * std::pow(std::abs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

double norm_L2(const Field& v, const Grid1D& grid) {
  if (v.size() != grid.nx) throw std::invalid_argument("norm_L2: size mismatch");
  const auto w = trapezoid_weights(grid);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i] * v[i];
  return std::sqrt(s);
}

double norm_Hs(const Field& v, int s, const Grid1D& grid) {
  if (s < 0 || s > 2) throw std::invalid_argument("norm_Hs: s in {0,1,2}");
  const double l2 = norm_L2(v, grid);
  double total = l2 * l2;
  const double h = grid.h();
  if (s >= 1) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double dq = (v[i + 1] - v[i]) / h;
      total += h * dq * dq;
    }
  }
  if (s >= 2) {
    const std::size_t n = v.size();
    const auto w = trapezoid_weights(grid);
    auto second = [&](std::size_t i) {
      if (i == 0) return (v[0] - 2.0 * v[1] + v[2]) / (h * h);
      if (i == n - 1) return (v[n - 3] - 2.0 * v[n - 2] + v[n - 1]) / (h * h);
      return (v[i - 1] - 2.0 * v[i] + v[i + 1]) / (h * h);
    };
    for (std::size_t i = 0; i < n; ++i) {
      const double sd = second(i);
      total += w[i] * sd * sd;
    }
  }
  return std::sqrt(total);
}

double norm_Hminus1(const Field& v, const Grid1D& grid,
                    const BoundaryCondition& bc) {
  if (v.size() != grid.nx)
    throw std::invalid_argument("norm_Hminus1: size mismatch");
  BoundaryCondition homogeneous{bc.kind, 0.0, 0.0};
  EllipticOp lift(Field(grid.nx, 1.0), Field(grid.nx, 1.0), homogeneous, grid);
  Field rhs = v;
  if (bc.kind == BcKind::Dirichlet) {
    rhs.front() = 0.0;
    rhs.back() = 0.0;
  }
  Field w;
  std::size_t bad = 0;
  if (!lift.system().solve(rhs, w, &bad))
    throw std::runtime_error("norm_Hminus1: lift solve failed");
  const auto tw = trapezoid_weights(grid);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += tw[i] * rhs[i] * w[i];
  return std::sqrt(std::max(0.0, s));
}

namespace {

double from_norm(const Field& v, FromSpace from, const Grid1D& grid) {
  switch (from) {
    case FromSpace::L2:
      return norm_L2(v, grid);
    case FromSpace::H1:
      return norm_Hs(v, 1, grid);
    case FromSpace::H2:
      return norm_Hs(v, 2, grid);
  }
  return 0.0;
}

std::vector<Field> embedding_test_set(const Grid1D& grid,
                                      const BoundaryCondition& bc,
                                      std::uint64_t seed,
                                      std::size_t random_trials) {
  const std::size_t n = grid.nx;
  const double len = grid.b - grid.a;
  const bool dirichlet = bc.kind == BcKind::Dirichlet;
  std::vector<Field> set;
  for (int k = 1; k <= 10; ++k) {
    Field v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double xh = (grid.x(i) - grid.a) / len;
      v[i] = dirichlet ? std::sin(k * kPi * xh) : std::cos(k * kPi * xh);
    }
    set.push_back(std::move(v));
  }
  if (!dirichlet) set.push_back(Field(n, 1.0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t t = 0; t < random_trials; ++t) {
    Field v(n, 0.0);
    for (int k = 1; k <= 8; ++k) {
      const double c = unif(rng) / (k * k);
      for (std::size_t i = 0; i < n; ++i) {
        const double xh = (grid.x(i) - grid.a) / len;
        v[i] += c * (dirichlet ? std::sin(k * kPi * xh)
                               : std::cos(k * kPi * xh));
      }
    }
    set.push_back(std::move(v));
  }
  // peaked bumps probe the L^infty side; the sine envelope keeps the
  // Dirichlet rows at zero
  for (double center : {0.3, 0.5, 0.77}) {
    for (double width : {0.05, 0.15}) {
      Field v(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double xh = (grid.x(i) - grid.a) / len;
        const double bump = std::exp(-0.5 * std::pow((xh - center) / width, 2));
        v[i] = bump * (dirichlet ? std::sin(kPi * xh) : 1.0);
      }
      set.push_back(std::move(v));
    }
  }
  return set;
}

}  // namespace

double embedding_constant(FromSpace from, double p, const Grid1D& grid,
                          const BoundaryCondition& bc, std::uint64_t seed,
                          std::size_t random_trials) {
  double best = 0.0;
  for (const auto& v : embedding_test_set(grid, bc, seed, random_trials)) {
    const double denom = from_norm(v, from, grid);
    if (denom <= 1e-14) continue;
    best = std::max(best, norm_Lp(v, p, grid) / denom);
  }
  return best;
}

double elliptic_regularity_constant(const EllipticOp& op, std::uint64_t seed,
                                    std::size_t trials) {
  const auto& grid = op.grid();
  double best = 0.0;
  for (const auto& v : embedding_test_set(grid, op.bc(), seed, trials)) {
    const double h2 = norm_Hs(v, 2, grid);
    const Field lv = op.apply_interior(v);
    const double denom = norm_L2(lv, grid) + norm_L2(v, grid);
    if (denom <= 1e-14) continue;
    best = std::max(best, h2 / denom);
  }
  return best;
}

}  // namespace fracdecay::space
