#include "wlab/flux.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wlab/errors.hpp"

namespace wlab {

double flux_at_parallel(const Parallel& p, double a, double b) {
  const ProfileState st{0.0, p.y, p.z, p.psi};
  return -std::numbers::pi * first_integral(st, a, b) * p.orientation;
}

double operator_term(const LoopSample& sample, const Vec3& Y, double a, double b) {
  if (!sample.shape) throw DomainError("loop sample has no curvature data");
  const Vec3 w = 2.0 * a * sample.conormal + b * sample.shape->apply_t(sample.conormal);
  return Y.dot(w);
}

double operator_quadratic_form(const LoopSample& sample, double a, double b) {
  return operator_term(sample, sample.conormal, a, b);
}

namespace {

void check_cap_matches(const std::vector<LoopSample>& loop, const TriMesh& cap) {
  if (cap.boundary_loops.size() != 1) {
    throw DomainError("cap must have exactly one boundary loop");
  }
  const auto& bl = cap.boundary_loops.front();
  if (bl.size() != loop.size()) throw DomainError("cap boundary does not match the loop");
  const double tol = 1e-9 * std::max(1.0, bounds(cap).diameter());
  for (const auto& s : loop) {
    const bool found = std::any_of(bl.begin(), bl.end(), [&](int v) {
      return (cap.vertices[v] - s.position).norm() <= tol;
    });
    if (!found) throw DomainError("cap boundary does not match the loop");
  }
}

double cap_integral(const TriMesh& cap, const Vec3& Y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < cap.triangles.size(); ++i) {
    sum += Y.dot(triangle_normal(cap, i)) * triangle_area(cap, i);
  }
  return sum;
}

double line_integral(const std::vector<LoopSample>& loop, const Vec3& Y, double a, double b) {
  double sum = 0.0;
  for (const auto& s : loop) sum += s.weight * operator_term(s, Y, a, b);
  return sum;
}

}  // namespace

FluxTerms flux_quadrature(const std::vector<LoopSample>& loop, const TriMesh& cap, double a,
                          double b, const Vec3& Y) {
  if (loop.size() < 3) throw DomainError("flux_quadrature: loop needs at least 3 samples");
  for (const auto& s : loop) {
    if (!s.shape) throw DomainError("flux_quadrature: missing curvature data along the loop");
  }
  check_cap_matches(loop, cap);
  FluxTerms t;
  t.cap = cap_integral(cap, Y);
  t.line = line_integral(loop, Y, a, b);
  t.value = t.cap - 0.5 * t.line;
  return t;
}

std::vector<LoopSample> parallel_loop(const ProfileState& state, const WeingartenRelation& relation,
                                      int n, double conormal_sign) {
  if (n < 3) throw DomainError("parallel_loop: need at least 3 samples");
  const double sp = std::sin(state.psi), cp = std::cos(state.psi);
  const double k2 = cp / state.y;
  const double k1 = solve_kappa1(relation, k2);
  std::vector<LoopSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * std::numbers::pi * j / n;
    const Vec3 er(std::cos(th), std::sin(th), 0.0);
    const Vec3 et(-std::sin(th), std::cos(th), 0.0);
    const Vec3 tm = sp * er + cp * Vec3::UnitZ();
    LoopSample s;
    s.position = Vec3(state.y * er.x(), state.y * er.y(), state.z);
    s.normal = -cp * er + sp * Vec3::UnitZ();
    s.conormal = conormal_sign * tm;
    s.shape = ShapeOperator{tm, k1, et, k2};
    s.weight = 2.0 * std::numbers::pi * state.y / n;
    out.push_back(s);
  }
  return out;
}

TriMesh disk_cap(const std::vector<LoopSample>& loop, const Vec3& normal_hint) {
  std::vector<Vec3> pts;
  pts.reserve(loop.size());
  Vec3 c = Vec3::Zero();
  for (const auto& s : loop) {
    pts.push_back(s.position);
    c += s.position;
  }
  c /= static_cast<double>(pts.size());
  Vec3 area = Vec3::Zero();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    area += (pts[i] - c).cross(pts[(i + 1) % pts.size()] - c);
  }
  if (area.dot(normal_hint) < 0.0) std::reverse(pts.begin(), pts.end());
  return fan_cap(pts, c);
}

FluxTerms parallel_flux(const ProfileState& state, const WeingartenRelation& relation, int n) {
  const auto [a, b] = relation.linear_params();
  const auto loop = parallel_loop(state, relation, n, -1.0);
  return flux_quadrature(loop, disk_cap(loop, -Vec3::UnitZ()), a, b);
}

double mass_of_end(const EndSpec& end) {
  if (!(end.r > 0.0) || end.r > end.R * (1.0 + 1e-12)) {
    throw DomainError("mass_of_end: need 0 < r <= R");
  }
  return std::numbers::pi * (end.R * end.r + end.b);
}

double cmc_mass(double r, double H) {
  if (!(H > 0.0) || !(r > 0.0) || !(r < 1.0 / H)) {
    throw DomainError("cmc_mass: need H > 0 and 0 < r < 1/H");
  }
  return std::numbers::pi * (r / H - r * r);
}

BalancingResult balancing_check(const CappedCycle& cycle, const Vec3& Y, double a, double b) {
  if (cycle.surface.boundary_loops.size() != cycle.caps.size()) {
    throw DomainError("balancing_check: cycle is not closed (caps do not match boundary loops)");
  }
  Aabb box = bounds(cycle.surface);
  const double tol = 1e-9 * std::max(1.0, box.diameter());
  std::vector<bool> used(cycle.caps.size(), false);
  for (const auto& loop : cycle.surface.boundary_loops) {
    bool matched = false;
    for (std::size_t c = 0; c < cycle.caps.size() && !matched; ++c) {
      if (used[c]) continue;
      const auto& disk = cycle.caps[c].disk;
      if (disk.boundary_loops.size() != 1 || disk.boundary_loops[0].size() != loop.size()) continue;
      const auto& dl = disk.boundary_loops[0];
      const bool all = std::all_of(loop.begin(), loop.end(), [&](int v) {
        return std::any_of(dl.begin(), dl.end(), [&](int w) {
          return (disk.vertices[w] - cycle.surface.vertices[v]).norm() <= tol;
        });
      });
      if (all) {
        used[c] = true;
        matched = true;
      }
    }
    if (!matched) throw DomainError("balancing_check: cycle is not closed (unmatched boundary)");
  }

  BalancingResult r;
  for (const auto& cap : cycle.caps) {
    check_cap_matches(cap.boundary, cap.disk);
    r.lhs += cap_integral(cap.disk, Y);
    r.rhs += 0.5 * line_integral(cap.boundary, Y, a, b);
    box.grow(bounds(cap.disk));
  }
  const double diff = std::abs(r.lhs - r.rhs);
  const double diam = box.diameter();
  r.residual = diff / (diam * diam);
  const double mag = std::max(std::abs(r.lhs), std::abs(r.rhs));
  r.relative = mag > 1e-6 * diam * diam ? diff / mag : r.residual;
  return r;
}

CappedCycle capped_profile_cycle(const ProfileCurve& curve, double s_lo, double s_hi,
                                 int n_theta) {
  auto rev = revolve(curve, n_theta, s_lo, s_hi, CapMode::kNone);
  CappedCycle cycle;
  const auto add_cap = [&](const ProfileState& st, double sign) {
    CycleCap cap;
    cap.boundary = parallel_loop(st, curve.relation, n_theta, sign);
    // The outward cap normal follows the vertical part of the outward conormal.
    const double up = cap.boundary.front().conormal.z();
    cap.disk = disk_cap(cap.boundary, up >= 0.0 ? Vec3::UnitZ() : Vec3(-Vec3::UnitZ()));
    cycle.caps.push_back(std::move(cap));
  };
  add_cap(rev.rings.front(), -1.0);
  add_cap(rev.rings.back(), 1.0);
  cycle.surface = std::move(rev.mesh);
  return cycle;
}

}  // namespace wlab
