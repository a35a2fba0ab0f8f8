#include "fracdecay/model.hpp"

#include <cmath>
#include <doctest.h>
#include <random>

using namespace fracdecay;
namespace md = fracdecay::model;

namespace {

constexpr double kPi = 3.14159265358979323846;

space::Field constant(std::size_t n, double v) { return space::Field(n, v); }

}  // namespace

TEST_CASE("normalize leaves normalized nonlinearities untouched") {
  auto g = space::Grid1D::make(0.0, 1.0, 5);
  auto p = constant(5, 1.0), q = constant(5, -1.0);
  md::SourceTerm src;
  src.r_inf = constant(5, 0.3);
  auto out = md::normalize(md::Nonlinearity::cubic(), p, q, src);
  CHECK(out.nl.normalized);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(out.q[i] == q[i]);
    CHECK(out.source.r_inf[i] == src.r_inf[i]);
  }
  for (double x : {-2.0, 0.0, 1.5})
    CHECK(out.nl.f(x) == doctest::Approx(x * x * x));
  (void)g;
}

TEST_CASE("normalize is solution-preserving: q u - p f(u) + r is invariant") {
  // the invariant pins the sign of the q-shift: q~ = q - f'(0) p
  const std::size_t n = 7;
  auto p = constant(n, 2.0);
  auto q = constant(n, 0.5);
  md::SourceTerm src;
  src.r_inf = constant(n, -0.7);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  auto run_case = [&](const md::Nonlinearity& nl) {
    auto out = md::normalize(nl, p, q, src);
    CHECK(out.nl.normalized);
    CHECK(std::abs(out.nl.f(0.0)) <= 1e-14);
    CHECK(std::abs(out.nl.fp(0.0)) <= 1e-14);
    for (int trial = 0; trial < 25; ++trial) {
      const double u = unif(rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double before = q[i] * u - p[i] * nl.f(u) + src.r_inf[i];
        const double after =
            out.q[i] * u - p[i] * out.nl.f(u) + out.source.r_inf[i];
        CHECK(before == doctest::Approx(after).epsilon(1e-12));
      }
    }
    return out;
  };

  SUBCASE("f = xi^3 + xi absorbs the linear part into q") {
    auto out = run_case(md::Nonlinearity::cubic_linear());
    // q~ = q - f'(0) p = q - p
    CHECK(out.q[0] == doctest::Approx(q[0] - p[0]));
    CHECK(out.nl.f(2.0) == doctest::Approx(8.0));
  }
  SUBCASE("f = exp(xi) shifts both q and r") {
    auto nl = md::Nonlinearity::custom(
        [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); },
        [](double x) { return std::exp(x); }, {0.0, 1.0, 1.0});
    auto out = run_case(nl);
    CHECK(out.q[0] == doctest::Approx(q[0] - p[0]));
    CHECK(out.source.r_inf[0] == doctest::Approx(src.r_inf[0] - p[0]));
    CHECK(out.nl.f(1.0) == doctest::Approx(std::exp(1.0) - 2.0));
  }
  SUBCASE("normalize is idempotent") {
    auto out = run_case(md::Nonlinearity::cubic_linear());
    auto again = md::normalize(out.nl, p, out.q, out.source);
    for (double x : {-1.0, 0.2, 3.0})
      CHECK(again.nl.f(x) == doctest::Approx(out.nl.f(x)));
    CHECK(again.q[0] == doctest::Approx(out.q[0]));
  }
}

TEST_CASE("check_pinfty margins") {
  const std::size_t n = 21;
  auto g = space::Grid1D::make(0.0, 1.0, n);
  auto nl = md::Nonlinearity::cubic();
  SUBCASE("q = -1 gives margin 1 at the zero steady state") {
    CHECK(md::check_pinfty(constant(n, 1.0), constant(n, -1.0), nl,
                           constant(n, 0.0)) == doctest::Approx(1.0));
  }
  SUBCASE("q = 0 at the zero steady state degenerates to margin 0") {
    CHECK(md::check_pinfty(constant(n, 1.0), constant(n, 0.0), nl,
                           constant(n, 0.0)) == doctest::Approx(0.0));
  }
  SUBCASE("Dirichlet endpoints pin the margin of sin profiles at zero") {
    space::Field u_inf(n);
    for (std::size_t i = 0; i < n; ++i) u_inf[i] = std::sin(kPi * g.x(i));
    const double margin =
        md::check_pinfty(constant(n, 1.0), constant(n, 0.0), nl, u_inf);
    // min over nodes of 3 sin^2 includes the endpoints, hence 0
    CHECK(margin == doctest::Approx(0.0).epsilon(1e-12));
    // excluding endpoints the margin is 3 sin^2 at the first interior node
    double interior = 1e300;
    for (std::size_t i = 1; i + 1 < n; ++i)
      interior = std::min(interior, 3.0 * u_inf[i] * u_inf[i]);
    CHECK(interior > 0.0);
  }
}

TEST_CASE("check_growth validates declared envelopes") {
  SUBCASE("cubic: |f''| = 6|xi| with (0,6,1), ratio 1") {
    auto r = md::check_growth(md::Nonlinearity::cubic(), -5.0, 5.0, 1001);
    CHECK(r.pass);
    CHECK(r.worst_ratio == doctest::Approx(1.0));
  }
  SUBCASE("quartic: |f''| = 12 xi^2 with kappa2 = 2") {
    auto r = md::check_growth(md::Nonlinearity::quartic(), -4.0, 4.0, 801);
    CHECK(r.pass);
    CHECK(r.worst_ratio == doctest::Approx(1.0));
  }
  SUBCASE("exp passes with a wide polynomial bound on a compact range") {
    // e^xi <= e + 22.03 |xi|^3 on [-10, 10] (c2 covers |xi| <= 1)
    auto nl = md::Nonlinearity::custom(
        [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); },
        [](double x) { return std::exp(x); }, {std::exp(1.0), 22.03, 3.0});
    auto r = md::check_growth(nl, -10.0, 10.0, 501);
    CHECK(r.pass);
  }
  SUBCASE("a violated envelope fails") {
    auto nl = md::Nonlinearity::cubic();
    nl.growth = {0.0, 5.0, 1.0};  // below the true 6|xi|
    CHECK_FALSE(md::check_growth(nl, -2.0, 2.0, 101).pass);
  }
}

TEST_CASE("check_summability classifies the requirement tables") {
  const double inf = std::numeric_limits<double>::infinity();
  SUBCASE("d=3 r=6 kappa2=1 is hi") {
    auto s = md::check_summability(3, 6.0, 1.0);
    CHECK(s.hi);
    CHECK_FALSE(s.lo);
  }
  SUBCASE("d=1 r=inf kappa2=1 is lo and hi") {
    auto s = md::check_summability(1, inf, 1.0);
    CHECK(s.lo);
    CHECK(s.hi);
  }
  SUBCASE("d=3 r=4 fails") {
    auto s = md::check_summability(3, 4.0, 1.0);
    CHECK(s.fail());
  }
  SUBCASE("d=2 needs r > 2 and finite kappa2") {
    CHECK(md::check_summability(2, 2.5, 7.0).hi);
    CHECK(md::check_summability(2, 2.0, 1.0).fail());
    CHECK(md::check_summability(2, 3.0, inf).fail());
  }
  SUBCASE("monotone: raising r or lowering kappa2 never breaks hi") {
    for (int d : {1, 2, 3}) {
      for (double r : {2.0, 2.5, 6.0, 8.0, inf}) {
        for (double k : {0.0, 0.5, 1.0, 1.5}) {
          if (!md::check_summability(d, r, k).hi) continue;
          CHECK(md::check_summability(d, std::min(r * 2.0, inf), k).hi);
          CHECK(md::check_summability(d, r, k * 0.5).hi);
        }
      }
    }
  }
}

TEST_CASE("check_decay_r bounds the forcing decay") {
  auto g = space::Grid1D::make(0.0, 1.0, 41);
  space::BoundaryCondition bc{space::BcKind::Dirichlet, 0.0, 0.0};
  auto tg = fracops::TimeGrid::uniform(50.0, 500);
  const double alpha = 0.5;
  SUBCASE("r identical to r_inf gives C_r = 0") {
    md::SourceTerm src;
    src.r_inf = constant(41, 1.0);
    CHECK(md::check_decay_r(src, tg, g, bc, md::DualNorm::L2, alpha, 0.0) ==
          0.0);
  }
  SUBCASE("power perturbation with unit-norm profile has C_r <= 1") {
    md::SourceTerm src;
    src.r_inf = constant(41, 0.0);
    src.kind = md::SourceTerm::Kind::Power;
    src.amplitude = 1.0;
    src.exponent = alpha;
    space::Field prof(41);
    for (std::size_t i = 0; i < 41; ++i) prof[i] = std::sin(kPi * g.x(i));
    const double nrm = space::norm_L2(prof, g);
    for (auto& v : prof) v /= nrm;
    src.profile = prof;
    const double c_r =
        md::check_decay_r(src, tg, g, bc, md::DualNorm::L2, alpha, 0.0);
    // sup_t t^alpha (1+t)^{-alpha} < 1, approached at the horizon
    CHECK(c_r <= 1.0 + 1e-12);
    CHECK(c_r > 0.9);
  }
  SUBCASE("footnote fixture: sup-based check fails by design") {
    // r_t = sum_j chi_{[j, j+j^{-4}]}: the induced r steps up by j^{-4} on
    // the j-th spike; ||r - r_inf|| does not decay in sup even though the
    // tail mass is summable. The sup-based C_r must blow up with the
    // horizon (here: C_r grows like T^alpha, no finite constant works).
    auto tg_long = fracops::TimeGrid::uniform(40.0, 4000);
    std::vector<space::Field> r_series(tg_long.nodes().size(),
                                       constant(41, 0.0));
    space::Field r_inf = constant(41, 0.0);
    // cumulative spike integral: r(t) = total mass of r_t up to t, which
    // converges to sum j^{-4} but keeps unit-height excursions of r - r_inf
    // impossible; instead encode the classic counterexample directly on
    // r - r_inf: unit-height pulses of width j^{-4} at integer times
    for (std::size_t n = 0; n < r_series.size(); ++n) {
      const double t = tg_long.t(n);
      for (int j = 1; j <= 39; ++j) {
        if (t >= j && t <= j + std::pow(j, -4.0)) {
          r_series[n] = constant(41, 1.0);
          break;
        }
      }
    }
    const double c_r_short = md::check_decay_r_series(
        std::vector<space::Field>(r_series.begin(), r_series.begin() + 401),
        r_inf, fracops::TimeGrid::uniform(4.0, 400), g, bc, md::DualNorm::L2,
        alpha, 0.0);
    const double c_r_long = md::check_decay_r_series(
        r_series, r_inf, tg_long, g, bc, md::DualNorm::L2, alpha, 0.0);
    CHECK(c_r_long > 2.0 * c_r_short);  // no horizon-independent constant
  }
}

TEST_CASE("check_between_states") {
  const std::size_t n = 11;
  SUBCASE("derivative bounded away from zero with q = 0") {
    auto nl = md::Nonlinearity::cubic_linear();  // f' >= 1
    std::vector<space::Field> hist{constant(n, 0.5), constant(n, -1.0)};
    const double m = md::check_between_states(
        constant(n, 2.0), constant(n, 0.0), nl, hist, constant(n, 0.0));
    CHECK(m >= 2.0);  // p * min f' = 2 * 1
  }
  SUBCASE("u = u_inf reduces to the pinfty margin") {
    auto nl = md::Nonlinearity::cubic();
    auto u_inf = constant(n, 0.7);
    std::vector<space::Field> hist{u_inf};
    const double m = md::check_between_states(constant(n, 1.0),
                                              constant(n, -0.5), nl, hist,
                                              u_inf);
    CHECK(m == doctest::Approx(md::check_pinfty(
                  constant(n, 1.0), constant(n, -0.5), nl, u_inf)));
  }
  SUBCASE("trajectory crossing zero fails for the pure cubic") {
    auto nl = md::Nonlinearity::cubic();
    std::vector<space::Field> hist{constant(n, 1.0), constant(n, 0.0)};
    const double m = md::check_between_states(
        constant(n, 1.0), constant(n, 0.0), nl, hist, constant(n, 1.0));
    CHECK(m <= 0.0);
  }
  SUBCASE("doubling the theta resolution does not flip the verdict") {
    auto nl = md::Nonlinearity::cubic();
    std::vector<space::Field> hist{constant(n, 0.4)};
    const double m16 = md::check_between_states(
        constant(n, 1.0), constant(n, -0.2), nl, hist, constant(n, 0.9), 16);
    const double m32 = md::check_between_states(
        constant(n, 1.0), constant(n, -0.2), nl, hist, constant(n, 0.9), 32);
    CHECK((m16 > 0.0) == (m32 > 0.0));
    CHECK(m16 == doctest::Approx(m32).epsilon(1e-2));
  }
}

TEST_CASE("Problem validation rejects inconsistent assemblies") {
  auto g = space::Grid1D::make(0.0, 1.0, 11);
  space::BoundaryCondition bc{space::BcKind::Dirichlet, 0.0, 0.0};
  space::EllipticOp op(constant(11, 1.0), constant(11, 0.0), bc, g);
  md::SourceTerm src;
  src.r_inf = constant(11, 0.0);
  md::Problem prob{g,
                   op,
                   0.5,
                   constant(11, 1.0),
                   constant(11, -1.0),
                   md::Nonlinearity::cubic(),
                   src,
                   bc,
                   constant(11, 0.0),
                   fracops::TimeGrid::uniform(1.0, 10),
                   std::numeric_limits<double>::infinity(),
                   2.0};
  CHECK_NOTHROW(prob.validate());
  SUBCASE("alpha out of range") {
    prob.alpha = 1.5;
    CHECK_THROWS(prob.validate());
  }
  SUBCASE("u0 violating Dirichlet data") {
    prob.u0 = constant(11, 0.2);
    CHECK_THROWS(prob.validate());
  }
  SUBCASE("s_exp below 2") {
    prob.s_exp = 1.0;
    CHECK_THROWS(prob.validate());
  }
}
