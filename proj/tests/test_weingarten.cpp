#include <doctest.h>

#include <cmath>
#include <random>

#include "wlab/errors.hpp"
#include "wlab/weingarten.hpp"

using namespace wlab;

TEST_CASE("linear_to_f at t = 0 and the umbilic quadratic") {
  const auto g = linear_to_f(1.0, 1.0);
  CHECK(g.f(0.0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
  // H = f(0), K = H^2 must satisfy 2aH + bK = 1
  const double H = g.f(0.0);
  CHECK(std::abs(2.0 * H + H * H - 1.0) < 1e-15);
}

TEST_CASE("linear_to_f solves 2aH + bK = 1 for t >= 0") {
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.1, 1.0, 4.0}) {
      const auto g = linear_to_f(a, b);
      for (double t : {0.0, 0.3, 1.0, 10.0, 1e4}) {
        const double H = g.f(t);
        const double K = H * H - t;
        CHECK(std::abs(2.0 * a * H + b * K - 1.0) < 1e-10 * (1.0 + b * t));
        // unrationalized form
        CHECK(H == doctest::Approx((std::sqrt(a * a + b + b * b * t) - a) / b).epsilon(1e-9));
        const double h = 1e-6 * (1.0 + t);
        const double fd = (g.f(t + h) - g.f(std::max(0.0, t - h))) / (t + h - std::max(0.0, t - h));
        CHECK(g.fprime(t) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("linear_to_f tends to the cmc value as b -> 0") {
  const double a = 1.3;
  for (double t : {0.0, 1.0, 5.0}) {
    CHECK(linear_to_f(a, 1e-9).f(t) == doctest::Approx(1.0 / (2.0 * a)).epsilon(1e-6));
  }
}

TEST_CASE("linear_to_f rejects non-positive parameters") {
  CHECK_THROWS_AS(linear_to_f(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(linear_to_f(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(WeingartenRelation::linear(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(WeingartenRelation::cmc(0.0), DomainError);
}

TEST_CASE("4 t f'(t)^2 < 1 for the linear relation") {
  const auto g = linear_to_f(1.0, 1.0);
  for (double t : {0.0, 1.0, 10.0, 1e6}) CHECK(4.0 * t * g.fprime(t) * g.fprime(t) < 1.0);
  const auto rep = check_ellipticity(g, 1e6, 200);
  CHECK(rep.elliptic);
  CHECK(rep.worst_margin > 0.0);
}

TEST_CASE("check_ellipticity: sqrt(t) sits on the boundary and fails") {
  GeneralParams g{[](double t) { return std::sqrt(t); },
                  [](double t) { return 0.5 / std::sqrt(t); }, "sqrt"};
  const auto rep = check_ellipticity(g, 1e6, 100);
  CHECK_FALSE(rep.elliptic);
  CHECK(std::abs(rep.worst_margin) < 1e-10);
  CHECK_THROWS_AS(WeingartenRelation::general(g.f, g.fprime, "sqrt"), DomainError);
}

TEST_CASE("check_ellipticity: constant f has margin 1") {
  GeneralParams g{[](double) { return 0.5; }, [](double) { return 0.0; }, "const"};
  const auto rep = check_ellipticity(g, 1e6, 50);
  CHECK(rep.elliptic);
  CHECK(rep.worst_margin == doctest::Approx(1.0));
}

TEST_CASE("check_ellipticity argument checks") {
  const auto g = linear_to_f(1.0, 1.0);
  CHECK_THROWS_AS(check_ellipticity(g, 0.0, 10), DomainError);
  CHECK_THROWS_AS(check_ellipticity(g, 1.0, 1), DomainError);
}

TEST_CASE("solve_kappa1 linear examples") {
  const auto rel = WeingartenRelation::linear(1.0, 1.0);
  CHECK(solve_kappa1(rel, 1.0) == doctest::Approx(0.0));
  CHECK(solve_kappa1(rel, 0.5) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(solve_kappa1(rel, -1.0), SingularDenominatorError);
}

TEST_CASE("solve_kappa1 cmc") {
  const auto rel = WeingartenRelation::cmc(0.5);
  CHECK(solve_kappa1(rel, 1.0) == doctest::Approx(0.0));
  CHECK(solve_kappa1(rel, 0.25) == doctest::Approx(0.75));
}

TEST_CASE("umbilic point of the general solver matches the sphere radius") {
  const auto g = linear_to_f(1.0, 1.0);
  const auto rel = WeingartenRelation::general(g.f, g.fprime, "linear(1,1)");
  const double k = std::sqrt(2.0) - 1.0;
  CHECK(solve_kappa1(rel, k) == doctest::Approx(k).epsilon(1e-12));
  CHECK(1.0 / rel.umbilic_curvature() == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("linear closed form satisfies 2aH + bK = 1") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.1, 1.0, 4.0}) {
      const auto rel = WeingartenRelation::linear(a, b);
      for (int i = 0; i < 200; ++i) {
        const double k2 = u(rng);
        if (std::abs(a + b * k2) < 1e-3) continue;
        const CurvaturePair c{solve_kappa1(rel, k2), k2};
        CHECK(std::abs(2.0 * a * c.mean() + b * c.gauss() - 1.0) < 1e-12 * (1.0 + std::abs(b * c.gauss())));
      }
    }
  }
}

TEST_CASE("general solver agrees with the linear closed form on the H > 0 branch") {
  // below k2 = -a/b the closed form lands on the other root of b H^2 + 2aH - 1 = bt,
  // which f (the positive root) never returns
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.1, 1.0, 4.0}) {
      const auto g = linear_to_f(a, b);
      const auto gen = WeingartenRelation::general(g.f, g.fprime);
      const auto lin = WeingartenRelation::linear(a, b);
      const double pole = -a / b;
      for (int i = 0; i <= 400; ++i) {
        const double k2 = -10.0 + 20.0 * i / 400.0;
        if (std::abs(k2 - pole) < 1e-3) continue;
        const double kl = solve_kappa1(lin, k2);
        if (k2 > pole) {
          const double kg = solve_kappa1(gen, k2);
          CHECK(std::abs(relation_residual(gen, {kg, k2})) < 1e-12);
          CHECK(std::abs(kg - kl) < 1e-9 * (1.0 + std::abs(kl)));
        } else {
          // g tends to k2 + a/b < 0 as kappa1 grows, so f has no root here;
          // the closed-form pair sits on the H < 0 root of the linear relation
          CHECK_THROWS_AS(solve_kappa1(gen, k2), BracketFailureError);
          const CurvaturePair c{kl, k2};
          CHECK(c.mean() < 0.0);
          CHECK(std::abs(2.0 * a * c.mean() + b * c.gauss() - 1.0) < 1e-9 * (1.0 + std::abs(b * c.gauss())));
        }
      }
    }
  }
}

TEST_CASE("general root is unique: g changes sign across it") {
  const auto g = linear_to_f(1.0, 1.0);
  const auto rel = WeingartenRelation::general(g.f, g.fprime);
  for (double k2 : {-0.9, -0.3, 0.0, 0.7, 3.0, 9.0}) {
    const double k1 = solve_kappa1(rel, k2);
    const double d = 1e-6;
    CHECK(relation_residual(rel, {k1 - d, k2}) < 0.0);
    CHECK(relation_residual(rel, {k1 + d, k2}) > 0.0);
  }
}

TEST_CASE("table relation interpolates monotonically and solves") {
  const auto g = linear_to_f(1.0, 1.0);
  std::vector<double> t, f;
  for (int i = 0; i <= 2000; ++i) {
    t.push_back(0.01 * i);
    f.push_back(g.f(t.back()));
  }
  const auto rel = WeingartenRelation::table(t, f);
  CHECK(rel.is_general());
  CHECK(rel.f(1.234) == doctest::Approx(g.f(1.234)).epsilon(1e-6));
  CHECK(rel.fprime(1.234) == doctest::Approx(g.fprime(1.234)).epsilon(1e-3));
  const double k1 = solve_kappa1(rel, 0.5);
  CHECK(k1 == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
  CHECK_THROWS_AS(WeingartenRelation::table({0.0, 1.0, 0.5, 2.0}, {1.0, 1.0, 1.0, 1.0}), DomainError);
}

TEST_CASE("length scale and umbilic curvature") {
  CHECK(WeingartenRelation::linear(2.0, 1.0).length_scale() == 2.0);
  CHECK(WeingartenRelation::cmc(0.25).length_scale() == 2.0);
  CHECK(WeingartenRelation::cmc(0.25).linear_params().a == 2.0);
  CHECK(WeingartenRelation::cmc(0.25).linear_params().b == 0.0);
  CHECK(WeingartenRelation::linear(1.0, 1.0).umbilic_curvature() == doctest::Approx(std::sqrt(2.0) - 1.0));
}
