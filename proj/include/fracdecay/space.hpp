#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fracdecay::space {

using Field = std::vector<double>;

/// Uniform 1D grid on [a, b] with nx >= 3 nodes.
struct Grid1D {
  double a;
  double b;
  std::size_t nx;

  static Grid1D make(double a, double b, std::size_t nx);
  double h() const { return (b - a) / static_cast<double>(nx - 1); }
  double x(std::size_t i) const { return a + h() * static_cast<double>(i); }
};

enum class BcKind { Dirichlet, Neumann };

/// Time-constant boundary data: Dirichlet values or outward-normal
/// derivatives at the two endpoints.
struct BoundaryCondition {
  BcKind kind = BcKind::Dirichlet;
  double left = 0.0;
  double right = 0.0;
};

/// Tridiagonal system with Thomas solve. `solve` runs without pivoting and
/// reports near-zero pivots through `singular_node`.
struct Tridiag {
  std::vector<double> lower, diag, upper;

  std::size_t size() const { return diag.size(); }
  Field apply(const Field& v) const;
  bool solve(const Field& rhs, Field& out, std::size_t* singular_node) const;
};

/// L = -d/dx (D du/dx) + d(x) u with Dirichlet or Neumann rows.
/// Construction rejects violated ellipticity (min D <= 0 or min d < 0).
class EllipticOp {
 public:
  EllipticOp(Field diffusion, Field reaction, BoundaryCondition bc,
             Grid1D grid);

  /// bc-aware system: Dirichlet rows are identity; Neumann rows eliminate
  /// the ghost node of the second-order flux condition (homogeneous data;
  /// inhomogeneous data shifts the rhs, see neumann_rhs_shift).
  const Tridiag& system() const { return system_; }
  /// Stencil value of L_h v at every node, one-sided second-difference
  /// closure at the boundary rows.
  Field apply_interior(const Field& v) const;
  double neumann_rhs_shift(bool left_end) const;

  const Grid1D& grid() const { return grid_; }
  const BoundaryCondition& bc() const { return bc_; }
  const Field& diffusion() const { return diffusion_; }
  const Field& reaction() const { return reaction_; }
  double min_diffusion() const;

 private:
  Field diffusion_, reaction_;
  BoundaryCondition bc_;
  Grid1D grid_;
  Tridiag system_;
};

/// Trapezoid-weighted L^p norm; p = infinity gives max |v|.
double norm_Lp(const Field& v, double p, const Grid1D& grid);
double norm_L2(const Field& v, const Grid1D& grid);

/// Discrete H^s norms, s in {0,1,2}: trapezoid L^2, plus the first-difference
/// seminorm on cells, plus the second-difference seminorm with one-sided
/// closures at the boundary.
double norm_Hs(const Field& v, int s, const Grid1D& grid);

/// Dual norm via the elliptic lift (-Laplace_h + I) w = v with homogeneous
/// boundary rows of the matching kind; returns sqrt(<v, w>_trapezoid).
double norm_Hminus1(const Field& v, const Grid1D& grid,
                    const BoundaryCondition& bc);

enum class FromSpace { L2, H1, H2 };

/// Empirical operator norm of the embedding (FromSpace, grid, bc) -> L^p:
/// the supremum of ||v||_{L^p} / ||v||_from over Fourier modes, random
/// trigonometric fields, and peaked profiles. A lower bound of the true
/// constant by construction.
double embedding_constant(FromSpace from, double p, const Grid1D& grid,
                          const BoundaryCondition& bc, std::uint64_t seed = 1,
                          std::size_t random_trials = 24);

/// Empirical elliptic-regularity constant: sup ||v||_{H2} / (||L v|| + ||v||)
/// over random homogeneous-bc test fields.
double elliptic_regularity_constant(const EllipticOp& op,
                                    std::uint64_t seed = 1,
                                    std::size_t trials = 32);

}  // namespace fracdecay::space
