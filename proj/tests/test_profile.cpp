#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wlab/errors.hpp"
#include "wlab/profile.hpp"

using namespace wlab;

TEST_CASE("profile_rhs examples") {
  const auto lin = WeingartenRelation::linear(1.0, 1.0);
  auto r = profile_rhs({0.0, 1.0, 0.0, 0.0}, lin);
  CHECK(r.dy == doctest::Approx(0.0));
  CHECK(r.dz == doctest::Approx(1.0));
  CHECK(r.dpsi == doctest::Approx(0.0));
  r = profile_rhs({0.0, 2.0, 0.0, 0.0}, lin);
  CHECK(r.dpsi == doctest::Approx(-1.0 / 3.0));
  r = profile_rhs({0.0, 1.0, 0.0, 0.0}, WeingartenRelation::cmc(0.5));
  CHECK(r.dy == doctest::Approx(0.0));
  CHECK(r.dz == doctest::Approx(1.0));
  CHECK(r.dpsi == doctest::Approx(0.0));
  CHECK_THROWS_AS(profile_rhs({0.0, 1e-12, 0.0, 0.0}, lin), AxisSingularityError);
}

TEST_CASE("first_integral at bulge and cylinder") {
  CHECK(first_integral({0.0, 1.5, 0.0, 0.0}, 1.0, 1.0) == doctest::Approx(2.25 - 3.0 - 1.0));
  CHECK(first_integral({0.0, 2.0, 0.0, 0.0}, 2.0, 0.5) == doctest::Approx(-4.0 - 0.5));
}

TEST_CASE("cylinder is a fixed profile") {
  const auto rel = WeingartenRelation::linear(1.0, 1.0);
  const auto c = integrate_profile({0.0, 1.0, 0.0, 0.0}, rel, 10.0);
  CHECK(c.termination == Termination::kReachedEnd);
  CHECK(c.samples.back().s == doctest::Approx(10.0));
  for (const auto& p : c.samples) {
    CHECK(std::abs(p.y - 1.0) < 1e-11);
    CHECK(std::abs(p.psi) < 1e-11);
    CHECK(p.z == doctest::Approx(p.s));
  }
  const auto ex = detect_extrema(c);
  CHECK(ex.status == ExtremaStatus::kDegenerate);
}

TEST_CASE("neck start oscillates between r and R = 2a - r") {
  const auto rel = WeingartenRelation::linear(1.0, 1.0);
  const auto c = integrate_profile({0.0, 0.5, 0.0, 0.0}, rel, 30.0);
  double lo = 1e9, hi = 0.0;
  for (const auto& p : c.samples) {
    lo = std::min(lo, p.y);
    hi = std::max(hi, p.y);
  }
  CHECK(lo == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(hi > 1.0);
  const auto ex = detect_extrema(c);
  REQUIRE(ex.status == ExtremaStatus::kOk);
  REQUIRE(ex.extrema.size() >= 3);
  CHECK(ex.extrema[1].kind == ExtremumKind::kBulge);
  CHECK(std::abs(ex.extrema[1].state.y - 1.5) < 1e-6);
  CHECK(ex.extrema[2].kind == ExtremumKind::kNeck);
  for (const auto& e : ex.extrema) CHECK(std::abs(std::sin(e.state.psi)) < 1e-10);
}

TEST_CASE("cmc H = 1/2, r = 0.3 gives R = 1.7") {
  const auto fam = delaunay_family(WeingartenRelation::cmc(0.5), 0.3);
  CHECK(std::abs(fam.R - 1.7) < 1e-6);
  // classical unduloid: arclength period pi / H
  CHECK(fam.period == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-8));
}

TEST_CASE("delaunay_family radii identity, periodicity, continuity") {
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.1, 1.0, 4.0}) {
      const auto rel = WeingartenRelation::linear(a, b);
      double prev_R = 1e300;
      for (int k = 1; k <= 9; ++k) {
        const auto f = delaunay_family(rel, 0.1 * k * a);
        CHECK(std::abs(f.R + f.r - 2.0 * a) < 1e-6);
        CHECK(f.R < prev_R);
        prev_R = f.R;
        const auto& s0 = f.curve.samples.front();
        const auto& s1 = f.curve.samples.back();
        CHECK(s1.s == doctest::Approx(f.period));
        CHECK(std::abs(s1.y - s0.y) < 1e-6);
        CHECK(std::abs(std::remainder(s1.psi - s0.psi, 2.0 * std::numbers::pi)) < 1e-6);
        CHECK(s1.z - s0.z == doctest::Approx(f.z_period));
        CHECK(f.z_period > 0.0);
      }
      const auto cyl = delaunay_family(rel, a);
      CHECK(cyl.cylinder);
      CHECK(cyl.R == doctest::Approx(a));
      CHECK(cyl.r == doctest::Approx(a));
      CHECK(cyl.period == doctest::Approx(2.0 * std::numbers::pi * std::sqrt(a * a + b)));
    }
  }
}

TEST_CASE("delaunay_family preconditions") {
  const auto rel = WeingartenRelation::linear(1.0, 1.0);
  CHECK_THROWS_AS(delaunay_family(rel, 0.0), DomainError);
  CHECK_THROWS_AS(delaunay_family(rel, 1.5), DomainError);
  CHECK_THROWS_AS(delaunay_family(rel, -0.2), DomainError);
  const auto g = linear_to_f(1.0, 1.0);
  CHECK_THROWS_AS(delaunay_family(WeingartenRelation::general(g.f, g.fprime), 0.5), DomainError);
}

TEST_CASE("small necks approach the football chain") {
  const auto rel = WeingartenRelation::linear(1.0, 1.0);
  double prev_gap = 1.0;
  for (double r : {1e-2, 1e-3, 1e-4}) {
    const auto f = delaunay_family(rel, r);
    const double gap = 2.0 - f.R;
    CHECK(gap < prev_gap);
    CHECK(gap == doctest::Approx(r).epsilon(1e-5));
    prev_gap = gap;
  }
}

TEST_CASE("first integral conserved over three periods") {
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.1, 1.0, 4.0}) {
      const auto rel = WeingartenRelation::linear(a, b);
      for (double frac : {0.1, 0.5, 0.9}) {
        const auto c = delaunay_periods(rel, frac * a, 3);
        const double i0 = c.first_integral_values.front();
        CHECK(c.first_integral_drift() < 1e-8 * (1.0 + std::abs(i0)));
        // finite differences of I along the samples
        for (std::size_t i = 1; i + 1 < c.samples.size(); i += 7) {
          const double ds = c.samples[i + 1].s - c.samples[i - 1].s;
          const double di = c.first_integral_values[i + 1] - c.first_integral_values[i - 1];
          CHECK(std::abs(di / ds) < 1e-8 * (1.0 + std::abs(i0)));
        }
      }
    }
  }
}

TEST_CASE("first-integral bracket vanishes on the closed-form kappa1") {
  const double a = 1.3, b = 0.7;
  const auto rel = WeingartenRelation::linear(a, b);
  for (double y : {0.4, 1.0, 2.5}) {
    for (double psi : {-1.0, 0.2, 1.2}) {
      const auto r = profile_rhs({0.0, y, 0.0, psi}, rel);
      const double bracket = y - a * std::cos(psi) + r.dpsi * (a * y + b * std::cos(psi));
      CHECK(std::abs(bracket) < 1e-12);
    }
  }
}

TEST_CASE("integrator error shrinks with tolerance") {
  const auto rel = WeingartenRelation::linear(1.0, 1.0);
  const auto ref = delaunay_family(rel, 0.5);
  const double s_end = 7.0;
  const ProfileState exact = integrate_profile({0.0, 0.5, 0.0, 0.0}, rel, s_end, {1e-13, 0.0, -1.0, {}}).samples.back();
  double prev = 1e9;
  for (double tol : {1e-5, 1e-7, 1e-9}) {
    const auto c = integrate_profile({0.0, 0.5, 0.0, 0.0}, rel, s_end, {tol, 0.0, -1.0, {}});
    const auto& e = c.samples.back();
    const double err = std::abs(e.y - exact.y) + std::abs(e.z - exact.z) + std::abs(e.psi - exact.psi);
    CHECK(err < prev);
    CHECK(err < 100.0 * tol);
    prev = err;
  }
  CHECK(ref.R > 1.0);
}

TEST_CASE("sphere profile radius") {
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.0, 1.0, 4.0}) {
      const auto sp = sphere_profile(a, b);
      const double rho = a + std::sqrt(a * a + b);
      CHECK(std::abs(sp.radius - rho) < 1e-5);
      CHECK(sp.closure_y < 1e-5 * rho);
      CHECK(sp.closure_psi < 1e-5);
      CHECK(sp.curve.first_integral_drift() < 1e-8 * (1.0 + rho * rho));
    }
  }
  CHECK(std::abs(sphere_profile(1.0, 1.0).radius - (1.0 + std::sqrt(2.0))) < 1e-5);
  CHECK(std::abs(sphere_profile(WeingartenRelation::cmc(0.5)).radius - 2.0) < 1e-5);
  CHECK_THROWS_AS(sphere_profile(WeingartenRelation::linear(1.0, 1.0), 1e-12), NumericalError);
  CHECK_THROWS_AS(sphere_profile(-1.0, 1.0), DomainError);
}

TEST_CASE("sphere profile for a general relation") {
  const auto g = linear_to_f(1.0, 1.0);
  const auto sp = sphere_profile(WeingartenRelation::general(g.f, g.fprime));
  CHECK(std::abs(sp.radius - (1.0 + std::sqrt(2.0))) < 1e-5);
  CHECK(sp.curve.first_integral_values.empty());
}

TEST_CASE("revolve cylinder has two boundary circles of radius a") {
  const auto rel = WeingartenRelation::linear(1.0, 1.0);
  const auto c = integrate_profile({0.0, 1.0, 0.0, 0.0}, rel, 3.0);
  const auto rm = revolve(c, 64);
  REQUIRE(rm.mesh.boundary_loops.size() == 2);
  for (const auto& loop : rm.mesh.boundary_loops) {
    CHECK(loop.size() == 64);
    for (int i : loop) CHECK(rm.mesh.vertices[i].head<2>().norm() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(revolve(c, 4), DomainError);
  CHECK_THROWS_AS(revolve(c, 64, 1.0, 1.0), DomainError);
}

TEST_CASE("revolved sphere area and topology") {
  const auto sp = sphere_profile(WeingartenRelation::cmc(1.0));  // radius 1
  const auto rm = revolve(sp.curve, 256, CapMode::kBoth);
  CHECK(is_closed(rm.mesh));
  CHECK(euler_characteristic(rm.mesh) == 2);
  CHECK(std::abs(mesh_area(rm.mesh) / (4.0 * std::numbers::pi) - 1.0) < 1e-3);
  CHECK(signed_volume(rm.mesh) > 0.0);
}

TEST_CASE("capped W-Delaunay period is a closed sphere-type mesh") {
  const auto f = delaunay_family(WeingartenRelation::linear(1.0, 1.0), 0.5);
  const auto rm = revolve(f.curve, 64, CapMode::kBoth);
  CHECK(is_closed(rm.mesh));
  CHECK(euler_characteristic(rm.mesh) == 2);
  CHECK(signed_volume(rm.mesh) > 0.0);
}

TEST_CASE("interpolate reproduces samples and stays between them") {
  const auto f = delaunay_family(WeingartenRelation::linear(1.0, 1.0), 0.5);
  const auto& c = f.curve;
  for (std::size_t i = 0; i < c.samples.size(); i += 5) {
    const auto p = c.interpolate(c.samples[i].s);
    CHECK(p.y == doctest::Approx(c.samples[i].y));
  }
  const double s = 0.5 * (c.samples[3].s + c.samples[4].s);
  const auto p = c.interpolate(s);
  const auto exact = integrate_profile({0.0, 0.5, 0.0, 0.0}, c.relation, s).samples.back();
  CHECK(std::abs(p.y - exact.y) < 1e-7);
}

TEST_CASE("running into the axis ends the integration normally") {
  const auto rel = WeingartenRelation::linear(1.0, 1.0);
  const auto sp = sphere_profile(rel);
  // continue well past the far pole
  const auto c = integrate_profile(sp.curve.samples.front(), rel, 20.0);
  CHECK(c.termination == Termination::kAxisApproach);
  CHECK(c.samples.back().y < 1e-3);
}
