#include "wlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "wlab/bvh.hpp"
#include "wlab/errors.hpp"
#include "wlab/io.hpp"

namespace wlab {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kInequalityHolds:
      return "inequality-holds";
    case Verdict::kInequalityViolated:
      return "inequality-violated";
    case Verdict::kCompactForced:
      return "compact-forced";
  }
  return "inequality-holds";
}

namespace {

double end_mass(const EndSpec& e) { return e.H != 0.0 ? cmc_mass(e.r, e.H) : mass_of_end(e); }

}  // namespace

double balance(const std::vector<EndSpec>& ends) {
  double pos = 0.0, neg = 0.0;
  for (const auto& e : ends) (e.sign == EndSign::kPositive ? pos : neg) += end_mass(e);
  return pos - neg;
}

BalanceReport theorem_two_verdict(double disk_area, const std::vector<EndSpec>& ends,
                                  std::optional<LinearParams> params) {
  if (!(disk_area > 0.0)) throw DomainError("disk area must be positive");
  BalanceReport rep;
  rep.disk_area = disk_area;
  for (const auto& e : ends) {
    (e.sign == EndSign::kPositive ? rep.positive_mass_sum : rep.negative_mass_sum) += end_mass(e);
  }
  rep.balance = rep.positive_mass_sum - rep.negative_mass_sum;

  const double scale = std::max(rep.positive_mass_sum, rep.negative_mass_sum);
  if (!ends.empty() && std::abs(rep.balance) <= 1e-12 * scale) {
    rep.verdict = Verdict::kCompactForced;
  } else if (rep.balance >= 0.0) {
    rep.verdict = disk_area <= rep.balance ? Verdict::kInequalityHolds : Verdict::kInequalityViolated;
  } else {
    rep.verdict = disk_area >= -rep.balance ? Verdict::kInequalityHolds : Verdict::kInequalityViolated;
  }

  if (!params && !ends.empty()) {
    const auto& e = ends.front();
    if (e.H != 0.0) {
      params = LinearParams{1.0 / (2.0 * e.H), 0.0};
    } else {
      params = LinearParams{0.5 * (e.R + e.r), e.b};
    }
  }
  if (params) {
    rep.min_positive_ends =
        min_positive_ends(std::sqrt(disk_area / std::numbers::pi), params->a, params->b);
  }
  return rep;
}

int min_positive_ends(double boundary_radius, double a, double b, bool sharp) {
  if (!(boundary_radius >= 0.0) || !(a > 0.0) || !(b >= 0.0)) {
    throw DomainError("min_positive_ends: need r >= 0, a > 0, b >= 0");
  }
  const double x = boundary_radius * boundary_radius / ((sharp ? 1.0 : 2.0) * a * a + b);
  const double k = std::round(x);
  if (std::abs(x - k) <= 1e-12 * std::max(1.0, x)) return static_cast<int>(k);
  return static_cast<int>(std::ceil(x));
}

int winding_number(const std::vector<Vec2>& loop, const Vec2& p) {
  if (loop.size() < 3) throw DomainError("winding_number: loop needs at least 3 points");
  double scale = 0.0;
  for (const auto& q : loop) scale = std::max(scale, (q - p).cwiseAbs().maxCoeff());
  const double on_tol = 1e-12 * std::max(scale, 1.0);
  int w = 0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2 u = loop[i] - p;
    const Vec2 v = loop[(i + 1) % loop.size()] - p;
    const double cross = u.x() * v.y() - u.y() * v.x();
    const Vec2 e = v - u;
    const double len = e.norm();
    // distance from p to the segment
    double dist = u.norm();
    if (len > 0.0) {
      const double s = std::clamp(-u.dot(e) / (len * len), 0.0, 1.0);
      dist = (u + s * e).norm();
    }
    if (dist <= on_tol) throw DomainError("winding_number: point lies on the curve");
    if (u.y() <= 0.0) {
      if (v.y() > 0.0 && cross > 0.0) ++w;
    } else if (v.y() <= 0.0 && cross < 0.0) {
      --w;
    }
  }
  return w;
}

PlanarLoopSet boundary_loop_set(const TriMesh& surface, const Vec3& p) {
  const double tol = 1e-9 * std::max(1.0, bounds(surface).diameter());
  if (std::abs(p.z()) > tol) throw DomainError("ray must start in the plane z = 0");
  PlanarLoopSet set;
  set.p = p.head<2>();
  for (const auto& loop : surface.boundary_loops) {
    std::vector<Vec2> pts;
    for (int i : loop) {
      const Vec3& v = surface.vertices[i];
      if (std::abs(v.z()) > tol) throw DomainError("boundary loop leaves the plane z = 0");
      pts.push_back(v.head<2>());
    }
    set.loops.push_back(std::move(pts));
  }
  return set;
}

ParityResult loop_parity_check(const PlanarLoopSet& set) {
  ParityResult r;
  r.loop_count = static_cast<int>(set.loops.size());
  for (const auto& loop : set.loops) {
    if (winding_number(loop, set.p) != 0) ++r.nonzero_winding;
  }
  r.pass = r.nonzero_winding % 2 == 0;
  return r;
}

ParityResult loop_parity_check(const TriMesh& surface, const std::vector<Vec3>& ray,
                               const Vec3& final_dir) {
  if (ray.empty()) throw DomainError("ray needs a start point");
  if (!(final_dir.z() >= 0.0) || !(final_dir.norm() > 0.0)) {
    throw DomainError("ray must end going into the upper halfspace");
  }
  for (const auto& q : ray) {
    if (q.z() < 0.0) throw DomainError("ray leaves the upper halfspace");
  }
  for (const auto& v : surface.vertices) {
    if (v.z() < -1e-9) throw DomainError("surface leaves the upper halfspace");
  }
  const auto set = boundary_loop_set(surface, ray.front());
  if (!surface.empty()) {
    const TriangleBvh bvh(surface);
    const Aabb box = bvh.bounds();
    const double far = box.diameter() + (ray.back() - box.center()).norm() + 1.0;
    std::vector<Vec3> pts = ray;
    pts.push_back(ray.back() + far * final_dir.normalized());
    // the start point sits on the plane, so the first segment is nudged up
    const Vec3 start = pts[0] + 1e-9 * far * (pts.size() > 1 ? (pts[1] - pts[0]).normalized() : Vec3::UnitZ());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (bvh.segment_intersects(i == 0 ? start : pts[i], pts[i + 1])) {
        throw DomainError("ray intersects the surface");
      }
    }
  }
  return loop_parity_check(set);
}

TriMesh half_torus(const Vec2& c, double r_in, double r_out, int n_theta, int n_phi) {
  if (!(r_in > 0.0) || !(r_out > r_in) || n_theta < 3 || n_phi < 2) {
    throw DomainError("half_torus: need 0 < r_in < r_out");
  }
  const double rc = 0.5 * (r_in + r_out), rho = 0.5 * (r_out - r_in);
  std::vector<std::vector<Vec3>> rings;
  for (int k = 0; k <= n_phi; ++k) {
    const double phi = std::numbers::pi * k / n_phi;
    const double rad = rc + rho * std::cos(phi);
    const double z = k == 0 || k == n_phi ? 0.0 : rho * std::sin(phi);
    std::vector<Vec3> ring;
    for (int j = 0; j < n_theta; ++j) {
      const double th = 2.0 * std::numbers::pi * j / n_theta;
      ring.emplace_back(c.x() + rad * std::cos(th), c.y() + rad * std::sin(th), z);
    }
    rings.push_back(std::move(ring));
  }
  return tube_mesh(rings, false);
}

TriMesh dome(const Vec2& c, double radius, int n_theta, int n_phi) {
  if (!(radius > 0.0) || n_theta < 3 || n_phi < 2) throw DomainError("dome: bad parameters");
  std::vector<std::vector<Vec3>> rings;
  for (int k = 0; k < n_phi; ++k) {
    const double phi = 0.5 * std::numbers::pi * k / n_phi;
    std::vector<Vec3> ring;
    for (int j = 0; j < n_theta; ++j) {
      const double th = 2.0 * std::numbers::pi * j / n_theta;
      ring.emplace_back(c.x() + radius * std::cos(phi) * std::cos(th),
                        c.y() + radius * std::cos(phi) * std::sin(th),
                        k == 0 ? 0.0 : radius * std::sin(phi));
    }
    rings.push_back(std::move(ring));
  }
  const TriMesh side = tube_mesh(rings, false);
  const TriMesh top = fan_cap(rings.back(), Vec3(c.x(), c.y(), radius));
  return welded(merged(side, top), 1e-12 * radius);
}

ParityTrial parity_trial(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int slots = 1 + static_cast<int>(rng() % 4);

  // radial slots [edges[i], edges[i+1]] around the origin, each holding at
  // most one annulus or one off-axis dome
  std::vector<double> edges{0.2};
  for (int i = 0; i < slots; ++i) edges.push_back(edges.back() + 0.3 + unit(rng));

  TriMesh surface;
  double top = 0.0;
  for (int i = 0; i < slots; ++i) {
    const double lo = edges[i] + 0.05, hi = edges[i + 1] - 0.05;
    const double choice = unit(rng);
    TriMesh piece;
    if (choice < 0.4) {
      piece = half_torus(Vec2::Zero(), lo, hi, 24, 6);
      top = std::max(top, 0.5 * (hi - lo));
    } else if (choice < 0.8) {
      const double th = 2.0 * std::numbers::pi * unit(rng);
      const double mid = 0.5 * (lo + hi);
      const double rad = 0.5 * (hi - lo);
      piece = dome(Vec2(mid * std::cos(th), mid * std::sin(th)), rad, 16, 4);
      top = std::max(top, rad);
    } else {
      continue;
    }
    surface = surface.empty() ? piece : merged(surface, piece);
  }

  const double lean = 0.15 * unit(rng);
  const double th = 2.0 * std::numbers::pi * unit(rng);
  const std::vector<Vec3> ray{Vec3::Zero(), Vec3(0.0, 0.0, top + 0.5)};
  const Vec3 dir(lean * std::cos(th), lean * std::sin(th), 1.0);
  const auto res = loop_parity_check(surface, ray, dir);
  return ParityTrial{seed, res.loop_count, res.nonzero_winding, res.pass};
}

std::vector<ParityTrial> parity_harness(std::uint64_t seed, int trials) {
  if (trials < 0) throw DomainError("trial count must be non-negative");
  std::mt19937_64 seeder(seed);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(trials));
  for (auto& s : seeds) s = seeder();
  std::vector<ParityTrial> out(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) { out[i] = parity_trial(seeds[i]); });
  return out;
}

}  // namespace wlab
