#include "fracdecay/space.hpp"

#include <cmath>
#include <doctest.h>
#include <random>

using namespace fracdecay;
namespace sp = fracdecay::space;

namespace {

constexpr double kPi = 3.14159265358979323846;

sp::Field sample(const sp::Grid1D& g, double (*f)(double)) {
  sp::Field v(g.nx);
  for (std::size_t i = 0; i < g.nx; ++i) v[i] = f(g.x(i));
  return v;
}

double sin_pi(double x) { return std::sin(kPi * x); }

}  // namespace

TEST_CASE("Grid1D validation") {
  CHECK_THROWS(sp::Grid1D::make(1.0, 0.0, 10));
  CHECK_THROWS(sp::Grid1D::make(0.0, 1.0, 2));
  auto g = sp::Grid1D::make(0.0, 1.0, 101);
  CHECK(g.h() == doctest::Approx(0.01));
  CHECK(g.x(100) == doctest::Approx(1.0));
}

TEST_CASE("constant-coefficient Dirichlet stencil is (-1,2,-1)/h^2") {
  auto g = sp::Grid1D::make(0.0, 1.0, 11);
  sp::EllipticOp op(sp::Field(11, 1.0), sp::Field(11, 0.0),
                    {sp::BcKind::Dirichlet, 0.0, 0.0}, g);
  const double h2 = 0.01;
  const auto& sys = op.system();
  for (std::size_t i = 1; i < 10; ++i) {
    CHECK(sys.lower[i] == doctest::Approx(-1.0 / h2));
    CHECK(sys.diag[i] == doctest::Approx(2.0 / h2));
    CHECK(sys.upper[i] == doctest::Approx(-1.0 / h2));
  }
  CHECK(sys.diag[0] == 1.0);
  CHECK(sys.diag[10] == 1.0);
}

TEST_CASE("apply to sin(pi x) approximates pi^2 sin(pi x) at O(h^2)") {
  double prev_err = 0.0;
  for (std::size_t nx : {51, 101}) {
    auto g = sp::Grid1D::make(0.0, 1.0, nx);
    sp::EllipticOp op(sp::Field(nx, 1.0), sp::Field(nx, 0.0),
                      {sp::BcKind::Dirichlet, 0.0, 0.0}, g);
    auto v = sample(g, sin_pi);
    auto lv = op.apply_interior(v);
    double err = 0.0;
    for (std::size_t i = 1; i + 1 < nx; ++i)
      err = std::max(err, std::abs(lv[i] - kPi * kPi * v[i]));
    if (prev_err > 0.0) CHECK(prev_err / err >= 3.6);
    prev_err = err;
  }
}

TEST_CASE("Neumann operator annihilates constants") {
  auto g = sp::Grid1D::make(0.0, 2.0, 21);
  sp::EllipticOp op(sp::Field(21, 3.0), sp::Field(21, 0.0),
                    {sp::BcKind::Neumann, 0.0, 0.0}, g);
  sp::Field c(21, 4.2);
  for (double r : op.system().apply(c)) CHECK(std::abs(r) <= 1e-11);
  for (double r : op.apply_interior(c)) CHECK(std::abs(r) <= 1e-11);
}

TEST_CASE("ellipticity violations are construction errors") {
  auto g = sp::Grid1D::make(0.0, 1.0, 5);
  CHECK_THROWS(sp::EllipticOp(sp::Field(5, 0.0), sp::Field(5, 0.0),
                              {sp::BcKind::Dirichlet, 0.0, 0.0}, g));
  CHECK_THROWS(sp::EllipticOp(sp::Field(5, -1.0), sp::Field(5, 0.0),
                              {sp::BcKind::Dirichlet, 0.0, 0.0}, g));
  CHECK_THROWS(sp::EllipticOp(sp::Field(5, 1.0), sp::Field(5, -0.5),
                              {sp::BcKind::Dirichlet, 0.0, 0.0}, g));
}

TEST_CASE("Thomas solve round-trips with apply") {
  auto g = sp::Grid1D::make(0.0, 1.0, 40);
  sp::EllipticOp op(sp::Field(40, 2.0), sp::Field(40, 1.0),
                    {sp::BcKind::Dirichlet, 0.0, 0.0}, g);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  sp::Field rhs(40);
  for (auto& r : rhs) r = unif(rng);
  rhs.front() = 0.0;
  rhs.back() = 0.0;
  sp::Field u;
  REQUIRE(op.system().solve(rhs, u, nullptr));
  auto back = op.system().apply(u);
  for (std::size_t i = 0; i < 40; ++i)
    CHECK(back[i] == doctest::Approx(rhs[i]).epsilon(1e-10));
}

TEST_CASE("norms: L2 and H1 against analytic values") {
  auto g = sp::Grid1D::make(0.0, 1.0, 201);
  SUBCASE("constant field") {
    sp::Field one(201, 1.0);
    CHECK(sp::norm_L2(one, g) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sp::norm_Hs(one, 0, g) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("sine mode") {
    auto v = sample(g, sin_pi);
    CHECK(sp::norm_L2(v, g) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
    // integral of sin^2 + pi^2 cos^2 = 1/2 + pi^2/2
    CHECK(sp::norm_Hs(v, 1, g) ==
          doctest::Approx(std::sqrt(0.5 + kPi * kPi / 2.0)).epsilon(1e-3));
    CHECK(sp::norm_Hs(v, 2, g) >= sp::norm_Hs(v, 1, g));
    CHECK(sp::norm_Hs(v, 1, g) >= sp::norm_Hs(v, 0, g));
  }
}

TEST_CASE("H^{-1} norm via the elliptic lift") {
  auto g = sp::Grid1D::make(0.0, 1.0, 201);
  sp::BoundaryCondition bc{sp::BcKind::Dirichlet, 0.0, 0.0};
  SUBCASE("zero field") {
    CHECK(sp::norm_Hminus1(sp::Field(201, 0.0), g, bc) == 0.0);
  }
  SUBCASE("eigenfunction value") {
    auto v = sample(g, sin_pi);
    const double expected = std::sqrt(0.5 / (kPi * kPi + 1.0));
    CHECK(sp::norm_Hminus1(v, g, bc) ==
          doctest::Approx(expected).epsilon(1e-3));
    CHECK(expected == doctest::Approx(0.2146).epsilon(1e-3));
  }
  SUBCASE("contraction below L2 on random fields") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      sp::Field v(201);
      for (auto& x : v) x = unif(rng);
      v.front() = 0.0;
      v.back() = 0.0;
      CHECK(sp::norm_Hminus1(v, g, bc) <= sp::norm_L2(v, g) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("norm ladder H^{-1} <= L2 <= H1 <= H2 on homogeneous fields") {
  auto g = sp::Grid1D::make(0.0, 1.0, 101);
  sp::BoundaryCondition bc{sp::BcKind::Dirichlet, 0.0, 0.0};
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    sp::Field v(101, 0.0);
    for (int k = 1; k <= 6; ++k) {
      const double c = unif(rng) / k;
      for (std::size_t i = 0; i < 101; ++i)
        v[i] += c * std::sin(k * kPi * g.x(i));
    }
    CHECK(sp::norm_Hminus1(v, g, bc) <= sp::norm_L2(v, g) * (1 + 1e-12));
    CHECK(sp::norm_L2(v, g) <= sp::norm_Hs(v, 1, g) * (1 + 1e-12));
    CHECK(sp::norm_Hs(v, 1, g) <= sp::norm_Hs(v, 2, g) * (1 + 1e-12));
  }
}

TEST_CASE("embedding constants") {
  auto g = sp::Grid1D::make(0.0, 1.0, 201);
  sp::BoundaryCondition bc{sp::BcKind::Dirichlet, 0.0, 0.0};
  SUBCASE("L2 -> L2 is the identity embedding") {
    CHECK(sp::embedding_constant(sp::FromSpace::L2, 2.0, g, bc) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("H1 -> Linf dominates the sine-mode candidate") {
    auto v = sample(g, sin_pi);
    const double candidate = 1.0 / sp::norm_Hs(v, 1, g);
    CHECK(sp::embedding_constant(sp::FromSpace::H1,
                                 std::numeric_limits<double>::infinity(), g,
                                 bc) >= candidate - 1e-12);
  }
  SUBCASE("constants are non-decreasing in the test-set size") {
    const double small = sp::embedding_constant(sp::FromSpace::H1, 4.0, g, bc,
                                                1, 6);
    const double large = sp::embedding_constant(sp::FromSpace::H1, 4.0, g, bc,
                                                1, 24);
    CHECK(large >= small - 1e-15);
  }
}

TEST_CASE("elliptic regularity constant is stable under refinement") {
  std::vector<double> constants;
  for (std::size_t nx : {51, 101, 201}) {
    auto g = sp::Grid1D::make(0.0, 1.0, nx);
    sp::EllipticOp op(sp::Field(nx, 1.0), sp::Field(nx, 0.0),
                      {sp::BcKind::Dirichlet, 0.0, 0.0}, g);
    constants.push_back(sp::elliptic_regularity_constant(op));
  }
  for (double c : constants) {
    CHECK(c > 0.5);
    CHECK(c < 5.0);
  }
  CHECK(std::abs(constants[2] - constants[1]) <=
        0.2 * constants[1] + 0.05);
}
