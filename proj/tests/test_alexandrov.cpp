#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wlab/alexandrov.hpp"
#include "wlab/errors.hpp"
#include "wlab/profile.hpp"

using namespace wlab;
using std::numbers::pi;

namespace {

// axis at x = d, plane x = 0, nu = e1
const ScanPlane kPlane{Vec3::Zero(), Vec3::UnitX(), 0.0};

TriMesh delaunay_end(double d, int n_theta, double amplitude = 0.0) {
  IntegrateOptions opt;
  opt.max_step = 0.02;
  const auto c = delaunay_periods(WeingartenRelation::linear(1.0, 1.0), 0.5, 1, opt);
  auto m = revolve(c, n_theta).mesh;
  m = transformed(m, Eigen::Matrix3d::Identity(), Vec3(d, 0, 0));
  if (amplitude != 0.0) {
    m = perturb_radially(m, d, 0.0, [amplitude](double z, double th) {
      return amplitude * std::exp(-z) * std::cos(th);
    });
  }
  return m;
}

Eigen::Matrix3d random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

}  // namespace

TEST_CASE("alpha1 on analytic cylinder and sphere") {
  const double d = 3.0, rho = 1.0;
  const CylinderSurface cyl(Vec3(d, 0, 0), Vec3::UnitZ(), rho, -5.0, 5.0);
  for (double eta : {-0.9, -0.3, 0.0, 0.5}) {
    const auto a = alpha1(cyl, kPlane, Vec3(0, eta, 1.0));
    REQUIRE(a);
    CHECK(*a == doctest::Approx(d));
  }
  const auto graze = alpha1(cyl, kPlane, Vec3(0, rho, 0.0));
  REQUIRE(graze);
  CHECK(*graze == doctest::Approx(d));
  CHECK_FALSE(alpha1(cyl, kPlane, Vec3(0, 1.5, 0.0)).has_value());
  CHECK_FALSE(alpha1(cyl, kPlane, Vec3(0, 0.0, 7.0)).has_value());
  CHECK_THROWS_AS(alpha1(cyl, kPlane, Vec3(0.5, 0, 0)), DomainError);

  const SphereSurface sph(Vec3(d, 0, 0), 2.0);
  for (double h : {-1.5, 0.0, 1.0}) {
    const auto s = alpha(sph, kPlane, h, 17);
    REQUIRE(s.alpha);
    CHECK(*s.alpha == doctest::Approx(d));
    CHECK(s.rays_hit > 0);
  }
  CHECK_FALSE(alpha(sph, kPlane, 2.5, 17).alpha.has_value());
  CHECK_THROWS_AS(alpha(sph, make_plane(Vec3::Zero(), Vec3(1, 0, 1)), 0.0, 5), DomainError);
}

TEST_CASE("alpha on a mesh sphere and on a tilted cylinder") {
  const double d = 2.5;
  const MeshSurface s(icosphere(4, 1.0, Vec3(d, 0, 0)));
  for (double h : {-0.6, 0.0, 0.4}) {
    const auto a = alpha(s, kPlane, h, 33);
    REQUIRE(a.alpha);
    CHECK(std::abs(*a.alpha - d) < 2e-3);
  }
  // chords of a cylinder tilted toward the plane normal move with height
  const MeshSurface tc(tilted_cylinder_mesh(1.0, 0.4, 3.0, 128, 24));
  const auto lo = alpha(tc, make_plane(Vec3(-5, 0, 0), Vec3::UnitX()), 0.5, 31);
  const auto hi = alpha(tc, make_plane(Vec3(-5, 0, 0), Vec3::UnitX()), 2.5, 31);
  REQUIRE(lo.alpha);
  REQUIRE(hi.alpha);
  CHECK(*hi.alpha - *lo.alpha == doctest::Approx(2.0 * std::tan(0.4)).epsilon(1e-2));
}

TEST_CASE("alpha on an exact W-Delaunay end is the axis distance") {
  const double d = 2.0;
  const MeshSurface s(delaunay_end(d, 256));
  std::vector<double> hs;
  for (int k = 0; k < 20; ++k) hs.push_back(0.3 + 0.4 * k);
  const auto rep = alpha_limit_check(s, kPlane, hs, d, 64, [](double) { return 1e-3; });
  CHECK(rep.passed);
  for (const auto& row : rep.rows) CHECK(row.error < 1e-3);
}

TEST_CASE("alpha under a decaying radial perturbation") {
  const double d = 2.0;
  const MeshSurface exact(delaunay_end(d, 256));
  const MeshSurface zero(delaunay_end(d, 256, 0.0));
  const MeshSurface pert(delaunay_end(d, 256, 0.1));
  std::vector<double> hs;
  for (int k = 0; k < 15; ++k) hs.push_back(0.5 + 0.25 * k);
  const auto rep = alpha_limit_check(pert, kPlane, hs, d, 96,
                                     [](double t) { return 0.2 * std::exp(-t); });
  CHECK(rep.passed);
  for (double h : {1.0, 2.0}) {
    CHECK(alpha(exact, kPlane, h, 16).alpha == alpha(zero, kPlane, h, 16).alpha);
  }
  CHECK_THROWS_AS(alpha_limit_check(pert, kPlane, {2.0, 1.0}, d, 8, [](double) { return 1.0; }),
                  DomainError);
}

TEST_CASE("reflect_through_plane") {
  const auto s = icosphere(2, 1.0, Vec3(0.3, -0.2, 0.5));
  const auto plane = make_plane(Vec3(0.1, 0.2, 0.3), Vec3(1, 2, 2), 0.7);
  const auto r = reflect_through_plane(s, plane);
  const auto rr = reflect_through_plane(r, plane);
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    CHECK((rr.vertices[i] - s.vertices[i]).cwiseAbs().maxCoeff() <= 1e-15 * 8);
  }
  CHECK(rr.triangles == s.triangles);
  CHECK(signed_volume(r) == doctest::Approx(signed_volume(s)));
  for (std::size_t i = 0; i < s.triangles.size(); ++i) {
    CHECK(std::abs(triangle_area(r, i) - triangle_area(s, i)) < 1e-12);
  }
  Vec3 c = Vec3::Zero(), cr = Vec3::Zero();
  for (const auto& v : s.vertices) c += v;
  for (const auto& v : r.vertices) cr += v;
  c /= s.vertices.size();
  cr /= r.vertices.size();
  CHECK((cr - (c - 2.0 * plane.signed_distance(c) * plane.normal)).norm() < 1e-12);

  // plane through the center maps an icosphere onto itself
  const auto u = icosphere(3, 1.0);
  const TriangleBvh bvh(u);
  for (const auto& v : reflect_through_plane(u, make_plane(Vec3::Zero(), Vec3::UnitX())).vertices) {
    CHECK(bvh.closest_point(v)->distance < 1e-12);
  }
}

TEST_CASE("moving plane on a sphere stops at the center") {
  const Vec3 c(0.4, -1.0, 2.0);
  const auto s = icosphere(4, 1.5, c);
  for (const Vec3& nu : {Vec3(1, 0, 0), Vec3(0, 1, 1), Vec3(-1, 2, 0.5)}) {
    const auto out = moving_plane_scan(s, nu);
    const double centre = c.dot(nu.normalized());
    CHECK(out.stop_t >= out.first_touch);
    CHECK(std::abs(out.stop_t - centre) < out.surface_tol + 2e-3);
    CHECK(out.contact == ContactKind::kInterior);
    REQUIRE(out.contact_point);
  }
}

TEST_CASE("moving plane on a capped W-Delaunay period stops at the axis plane") {
  const auto f = delaunay_family(WeingartenRelation::linear(1.0, 1.0), 0.5);
  const auto m = revolve(f.curve, 96, CapMode::kBoth).mesh;
  const auto out = moving_plane_scan(m, Vec3::UnitX());
  CHECK(std::abs(out.stop_t) < out.surface_tol + 1e-3);
  CHECK(out.contact != ContactKind::kNone);
}

TEST_CASE("two spheres: stop before the midplane, matching a brute-force sweep") {
  const auto m = merged(icosphere(3, 1.0, Vec3(-2.5, 0, 0)), icosphere(3, 0.6, Vec3(1.0, 0, 0)));
  ScanOptions opt;
  const auto out = moving_plane_scan(m, Vec3::UnitX(), opt);
  const double mid = 0.5 * (-3.5 + 1.6);
  CHECK(out.stop_t < mid);
  CHECK(out.contact == ContactKind::kInterior);
  // brute force: first t on a fine grid where some reflected vertex of the
  // swept part lands outside both balls by more than the tolerance
  const double eps = out.surface_tol;
  auto outside = [&](const Vec3& p) {
    return std::min((p - Vec3(-2.5, 0, 0)).norm() - 1.0, (p - Vec3(1.0, 0, 0)).norm() - 0.6);
  };
  double brute = 1e9;
  for (double t = -3.5; t < 1.6 && brute > 1e8; t += 1e-3) {
    for (const auto& v : m.vertices) {
      if (v.x() > t) continue;
      const Vec3 p(2.0 * t - v.x(), v.y(), v.z());
      if (outside(p) > eps) {
        brute = t;
        break;
      }
    }
  }
  CHECK(std::abs(out.stop_t - brute) < 5e-3);
  // small sphere is the one that stops the plane
  CHECK(brute == doctest::Approx(-2.5).epsilon(0.02));
}

TEST_CASE("scan input validation") {
  auto open = icosphere(2, 1.0);
  open.triangles.pop_back();
  compute_boundary_loops(open);
  CHECK_THROWS_AS(moving_plane_scan(open, Vec3::UnitX()), DomainError);
  const auto overlap = merged(icosphere(2, 1.0), icosphere(2, 1.0, Vec3(0.5, 0, 0)));
  CHECK_THROWS_AS(moving_plane_scan(overlap, Vec3::UnitX()), DomainError);
  CHECK_THROWS_AS(moving_plane_scan(icosphere(2, 1.0), Vec3::Zero()), DomainError);
}

TEST_CASE("contact classification") {
  // a box-like tube whose side wall tilts: graph property is lost first
  const auto tc = tilted_cylinder_mesh(1.0, 0.6, 2.0, 64, 8);
  const auto out = moving_plane_scan(tc, Vec3(0, 0, 1));
  CHECK(out.contact != ContactKind::kNone);
  CHECK(std::string(to_string(ContactKind::kGraphViolation)) == "graph-violation");
  CHECK(std::string(to_string(ContactKind::kBoundary)) == "boundary");
}

TEST_CASE("sphere symmetry in all grid directions and under rigid motions") {
  const Vec3 c(0.2, 0.1, -0.3);
  const auto s = icosphere(4, 1.0, c);
  const TriangleBvh bvh(s);
  const auto rot = random_rotation(11);
  const Vec3 shift(0.7, -1.1, 0.4);
  const TriangleBvh moved(transformed(s, rot, shift));
  ScanOptions opt;
  for (const auto& nu : grid_directions()) {
    const auto sym = alexandrov_symmetry(bvh, nu, 1e-3, opt);
    REQUIRE(sym.plane);
    CHECK(std::abs(sym.plane->signed_distance(c)) < 1e-3);
    const Vec3 nu2 = rot * nu;
    const auto sym2 = alexandrov_symmetry(moved, nu2, 1e-3, opt);
    REQUIRE(sym2.plane);
    CHECK(std::abs(sym2.plane->signed_distance(rot * c + shift)) < 1e-3);
    opt.check_input = false;
  }
}

TEST_CASE("tilted cylinder has exactly one symmetry plane") {
  const double beta = 0.35;
  const auto m = tilted_cylinder_mesh(1.0, beta, 2.0, 128, 16);
  const TriangleBvh bvh(m);
  const auto sy = alexandrov_symmetry(bvh, Vec3::UnitY(), 1e-3);
  REQUIRE(sy.plane);
  CHECK(std::abs(sy.plane->offset) < 1e-3);
  CHECK_FALSE(alexandrov_symmetry(bvh, Vec3::UnitX(), 1e-3).plane.has_value());
  CHECK_FALSE(alexandrov_symmetry(bvh, Vec3::UnitZ(), 1e-3).plane.has_value());
  CHECK_THROWS_AS(tilted_cylinder_mesh(1.0, 2.0, 1.0, 32, 4), DomainError);
}

TEST_CASE("grid directions") {
  const auto g = grid_directions();
  CHECK(g.size() == 26);
  for (const auto& v : g) CHECK(v.norm() == doctest::Approx(1.0));
}

TEST_CASE("sphere stop parameter converges under refinement") {
  double prev = 1e9;
  for (int level = 2; level <= 5; ++level) {
    const auto out = moving_plane_scan(icosphere(level, 1.0), Vec3::UnitX());
    const double err = std::abs(out.stop_t);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}
