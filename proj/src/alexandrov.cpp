#include "wlab/alexandrov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wlab/errors.hpp"

namespace wlab {

ScanPlane make_plane(const Vec3& base, const Vec3& normal, double offset) {
  const double n = normal.norm();
  if (!(n > 0.0)) throw DomainError("scan plane normal must be nonzero");
  return ScanPlane{base, normal / n, offset};
}

MeshSurface::MeshSurface(TriMesh mesh)
    : bvh_(std::make_shared<const TriangleBvh>(std::move(mesh))) {}

MeshSurface::MeshSurface(std::shared_ptr<const TriangleBvh> bvh) : bvh_(std::move(bvh)) {}

std::vector<SurfaceHit> MeshSurface::line_hits(const Vec3& origin, const Vec3& dir) const {
  const auto raw = bvh_->intersect(origin, dir);
  std::vector<SurfaceHit> out;
  const double merge = 1e-10 * std::max(1.0, bvh_->bounds().diameter()) / dir.norm();
  const Vec3 d = dir.normalized();
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t j = i + 1;
    while (j < raw.size() && raw[j].t - raw[i].t <= merge) ++j;
    Vec3 n = Vec3::Zero();
    bool pos = false, neg = false;
    for (std::size_t k = i; k < j; ++k) {
      const Vec3& nk = bvh_->normal(raw[k].triangle);
      n += nk;
      const double s = nk.dot(d);
      pos = pos || s > 0.0;
      neg = neg || s < 0.0;
    }
    const double len = n.norm();
    SurfaceHit h{raw[i].t, len > 0.0 ? Vec3(n / len) : bvh_->normal(raw[i].triangle), pos && neg};
    out.push_back(h);
    i = j;
  }
  return out;
}

SphereSurface::SphereSurface(const Vec3& center, double radius) : center_(center), radius_(radius) {
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
}

std::vector<SurfaceHit> SphereSurface::line_hits(const Vec3& origin, const Vec3& dir) const {
  const Vec3 w = origin - center_;
  const double A = dir.squaredNorm();
  const double B = 2.0 * w.dot(dir);
  const double C = w.squaredNorm() - radius_ * radius_;
  const double disc = B * B - 4.0 * A * C;
  const double scale = B * B + std::abs(4.0 * A * C);
  if (disc < -1e-14 * scale) return {};
  if (disc <= 1e-14 * scale) {
    const double t = -B / (2.0 * A);
    return {{t, (origin + t * dir - center_).normalized(), true}};
  }
  const double sq = std::sqrt(disc);
  const double t0 = (-B - sq) / (2.0 * A);
  const double t1 = (-B + sq) / (2.0 * A);
  return {{t0, (origin + t0 * dir - center_) / radius_, false},
          {t1, (origin + t1 * dir - center_) / radius_, false}};
}

Aabb SphereSurface::bounds() const {
  Aabb b;
  b.grow(center_ - Vec3::Constant(radius_));
  b.grow(center_ + Vec3::Constant(radius_));
  return b;
}

CylinderSurface::CylinderSurface(const Vec3& axis_point, const Vec3& axis_dir, double radius,
                                 double z_lo, double z_hi)
    : point_(axis_point), dir_(axis_dir.normalized()), radius_(radius), z_lo_(z_lo), z_hi_(z_hi) {
  if (!(radius > 0.0) || !(z_hi > z_lo) || !(std::abs(dir_.z()) > 0.0)) {
    throw DomainError("cylinder needs radius > 0, z_hi > z_lo and a non-horizontal axis");
  }
}

std::vector<SurfaceHit> CylinderSurface::line_hits(const Vec3& origin, const Vec3& dir) const {
  const Vec3 w0 = origin - point_;
  const Vec3 w = w0 - w0.dot(dir_) * dir_;
  const Vec3 dv = dir - dir.dot(dir_) * dir_;
  const double A = dv.squaredNorm();
  if (A < 1e-24 * dir.squaredNorm()) return {};
  const double B = 2.0 * w.dot(dv);
  const double C = w.squaredNorm() - radius_ * radius_;
  const double disc = B * B - 4.0 * A * C;
  const double scale = B * B + std::abs(4.0 * A * C);
  std::vector<SurfaceHit> out;
  auto add = [&](double t, bool tangential) {
    const Vec3 x = origin + t * dir;
    if (x.z() < z_lo_ || x.z() > z_hi_) return;
    const Vec3 r = (x - point_) - (x - point_).dot(dir_) * dir_;
    out.push_back({t, r.normalized(), tangential});
  };
  if (disc < -1e-14 * scale) return out;
  if (disc <= 1e-14 * scale) {
    add(-B / (2.0 * A), true);
    return out;
  }
  const double sq = std::sqrt(disc);
  add((-B - sq) / (2.0 * A), false);
  add((-B + sq) / (2.0 * A), false);
  return out;
}

Aabb CylinderSurface::bounds() const {
  Aabb b;
  for (double z : {z_lo_, z_hi_}) {
    const Vec3 c = point_ + (z - point_.z()) / dir_.z() * dir_;
    const double rx = radius_ / std::abs(dir_.z());
    b.grow(c - Vec3(rx, rx, 0.0));
    b.grow(c + Vec3(rx, rx, 0.0));
  }
  return b;
}

std::optional<double> alpha1(const RaySurface& surface, const ScanPlane& plane, const Vec3& p,
                             double tangency) {
  if (std::abs(plane.signed_distance(p)) > 1e-9 * (1.0 + p.norm())) {
    throw DomainError("alpha1: point does not lie on the plane");
  }
  const auto hits = surface.line_hits(p, plane.normal);
  if (hits.empty()) return std::nullopt;
  const auto& h1 = hits.back();
  if (h1.tangential || std::abs(h1.normal.dot(plane.normal)) < tangency) return h1.t;
  if (hits.size() < 2) return std::nullopt;
  return 0.5 * (h1.t + hits[hits.size() - 2].t);
}

AlphaSample alpha(const RaySurface& surface, const ScanPlane& plane, double height, int n_rays,
                  std::optional<std::pair<double, double>> lateral_range) {
  if (std::abs(plane.normal.z()) > 1e-12) throw DomainError("alpha: scan plane must be vertical");
  if (n_rays < 1) throw DomainError("alpha: need at least one ray");
  const Vec3 w = Vec3::UnitZ().cross(plane.normal).normalized();
  Vec3 o = plane.origin();
  o.z() = height;
  double lo = 0.0, hi = 0.0;
  if (lateral_range) {
    std::tie(lo, hi) = *lateral_range;
  } else {
    const Aabb b = surface.bounds();
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (int c = 0; c < 8; ++c) {
      const Vec3 corner((c & 1) ? b.hi.x() : b.lo.x(), (c & 2) ? b.hi.y() : b.lo.y(),
                        (c & 4) ? b.hi.z() : b.lo.z());
      const double eta = (corner - o).dot(w);
      lo = std::min(lo, eta);
      hi = std::max(hi, eta);
    }
  }
  AlphaSample out{height, std::nullopt, 0};
  for (int k = 0; k < n_rays; ++k) {
    const double eta = lo + (k + 0.5) * (hi - lo) / n_rays;
    const auto a = alpha1(surface, plane, o + eta * w);
    if (!a) continue;
    ++out.rays_hit;
    out.alpha = out.alpha ? std::max(*out.alpha, *a) : *a;
  }
  return out;
}

AlphaTable alpha_table(const RaySurface& surface, const ScanPlane& plane,
                       const std::vector<double>& heights, int n_rays) {
  AlphaTable t{plane, heights, {}};
  t.alpha.reserve(heights.size());
  for (double h : heights) t.alpha.push_back(alpha(surface, plane, h, n_rays).alpha);
  return t;
}

AlphaLimitReport alpha_limit_check(const RaySurface& surface, const ScanPlane& plane,
                                   const std::vector<double>& heights, double d, int n_rays,
                                   const std::function<double(double)>& bound) {
  for (std::size_t i = 1; i < heights.size(); ++i) {
    if (!(heights[i] > heights[i - 1])) {
      throw DomainError("alpha_limit_check: heights must increase");
    }
  }
  AlphaLimitReport rep;
  rep.passed = !heights.empty();
  for (double t : heights) {
    const auto s = alpha(surface, plane, t, n_rays);
    AlphaLimitRow row{t, s.alpha.value_or(std::numeric_limits<double>::quiet_NaN()), 0.0, bound(t),
                      false};
    row.error = std::abs(row.alpha - d);
    row.within = s.alpha.has_value() && row.error <= row.bound;
    rep.passed = rep.passed && row.within;
    rep.rows.push_back(row);
  }
  return rep;
}

TriMesh reflect_through_plane(const TriMesh& mesh, const ScanPlane& plane) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) v -= 2.0 * plane.signed_distance(v) * plane.normal;
  for (auto& t : out.triangles) std::swap(t[1], t[2]);
  compute_boundary_loops(out);
  return out;
}

TriMesh perturb_radially(const TriMesh& mesh, double axis_x, double axis_y,
                         const std::function<double(double, double)>& amplitude) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) {
    const double dx = v.x() - axis_x, dy = v.y() - axis_y;
    const double r = std::hypot(dx, dy);
    if (r == 0.0) continue;
    const double f = (r + amplitude(v.z(), std::atan2(dy, dx))) / r;
    v.x() = axis_x + f * dx;
    v.y() = axis_y + f * dy;
  }
  return out;
}

const char* to_string(ContactKind kind) {
  switch (kind) {
    case ContactKind::kInterior:
      return "interior";
    case ContactKind::kBoundary:
      return "boundary";
    case ContactKind::kGraphViolation:
      return "graph-violation";
    case ContactKind::kNone:
      return "none";
  }
  return "none";
}

namespace {

void check_scan_input(const TriangleBvh& bvh) {
  if (!is_closed(bvh.mesh())) throw DomainError("moving_plane_scan: mesh is not closed");
  if (const auto hit = find_self_intersection(bvh)) {
    std::ostringstream os;
    os << "moving_plane_scan: self-intersection between triangles " << hit->first << " and "
       << hit->second;
    throw DomainError(os.str());
  }
}

double default_surface_tol(const TriMesh& mesh) {
  return 2.0 * estimate_sagitta(mesh) + 1e-9 * bounds(mesh).diameter();
}

struct Violation {
  ContactKind kind;
  Vec3 point;
};

class PlaneScanner {
 public:
  PlaneScanner(const TriangleBvh& bvh, const Vec3& nu, const ScanOptions& opt, double eps)
      : bvh_(bvh), nu_(nu), opt_(opt), eps_(eps) {
    const auto& m = bvh.mesh();
    std::vector<bool> used(m.vertices.size(), false);
    for (const auto& t : m.triangles) {
      for (int i : t) used[i] = true;
    }
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
      if (used[i]) verts_.push_back({m.vertices[i].dot(nu), static_cast<int>(i)});
    }
    std::sort(verts_.begin(), verts_.end());
    lo_.assign(verts_.size(), 1.0);
    hi_.assign(verts_.size(), 0.0);

    std::vector<std::pair<double, int>> tris;
    for (std::size_t i = 0; i < m.triangles.size(); ++i) {
      double top = -std::numeric_limits<double>::infinity();
      for (int v : m.triangles[i]) top = std::max(top, m.vertices[v].dot(nu));
      tris.push_back({top, static_cast<int>(i)});
    }
    std::sort(tris.begin(), tris.end());
    double best = -std::numeric_limits<double>::infinity();
    int arg = -1;
    for (const auto& [top, i] : tris) {
      const double s = bvh.normal(i).dot(nu);
      if (s > best) {
        best = s;
        arg = i;
      }
      tri_top_.push_back(top);
      prefix_max_.push_back(best);
      prefix_arg_.push_back(arg);
    }
    boundary_band_ = 2.0 * max_edge_length(m);
  }

  double first_touch() const { return verts_.front().first; }
  double last_touch() const { return verts_.back().first; }

  std::optional<Violation> test(double tau) {
    for (std::size_t k = 0; k < verts_.size() && verts_[k].first <= tau; ++k) {
      if (lo_[k] <= tau && tau <= hi_[k]) continue;
      const double h = verts_[k].first;
      const Vec3& v = bvh_.mesh().vertices[verts_[k].second];
      const Vec3 p = v + 2.0 * (tau - h) * nu_;
      const auto cp = bvh_.closest_point(p);
      const double d = cp ? cp->distance : std::numeric_limits<double>::infinity();
      double margin = 0.0;
      if (d <= eps_) {
        margin = 0.5 * (eps_ - d);
      } else if (bvh_.contains(p)) {
        margin = 0.5 * (d + eps_);
      } else {
        return Violation{tau - h < boundary_band_ ? ContactKind::kBoundary : ContactKind::kInterior,
                         p};
      }
      lo_[k] = tau - margin;
      hi_[k] = tau + margin;
    }
    const auto below = static_cast<std::size_t>(
        std::upper_bound(tri_top_.begin(), tri_top_.end(), tau) - tri_top_.begin());
    if (below > 0 && prefix_max_[below - 1] > opt_.normal_tol) {
      return Violation{ContactKind::kGraphViolation,
                       triangle_centroid(bvh_.mesh(), static_cast<std::size_t>(prefix_arg_[below - 1]))};
    }
    return std::nullopt;
  }

 private:
  const TriangleBvh& bvh_;
  Vec3 nu_;
  ScanOptions opt_;
  double eps_;
  double boundary_band_ = 0.0;
  std::vector<std::pair<double, int>> verts_;
  std::vector<double> lo_, hi_;  // per sorted vertex: parameter interval known to be safe
  std::vector<double> tri_top_, prefix_max_;
  std::vector<int> prefix_arg_;
};

Vec3 unit_direction(const Vec3& nu) {
  const double n = nu.norm();
  if (!(n > 0.0)) throw DomainError("scan direction must be nonzero");
  return nu / n;
}

}  // namespace

ScanOutcome moving_plane_scan(const TriangleBvh& bvh, const Vec3& nu_in,
                              const ScanOptions& options) {
  const Vec3 nu = unit_direction(nu_in);
  if (options.check_input) check_scan_input(bvh);
  if (!(options.tol > 0.0)) throw DomainError("moving_plane_scan: tol must be positive");
  const double eps = options.surface_tol > 0.0 ? options.surface_tol : default_surface_tol(bvh.mesh());
  PlaneScanner scanner(bvh, nu, options, eps);

  ScanOutcome out;
  out.surface_tol = eps;
  out.first_touch = scanner.first_touch();
  const double extent = scanner.last_touch() - scanner.first_touch();
  const double step = options.step > 0.0 ? options.step : extent / 200.0;

  double prev = out.first_touch;
  std::optional<Violation> bad;
  double tau = prev;
  while (prev <= scanner.last_touch()) {
    tau = prev + step;
    bad = scanner.test(tau);
    if (bad) break;
    prev = tau;
  }
  if (!bad) {
    out.stop_t = scanner.last_touch();
    out.contact = ContactKind::kNone;
    return out;
  }
  double lo = prev, hi = tau;
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    if (auto v = scanner.test(mid)) {
      hi = mid;
      bad = v;
    } else {
      lo = mid;
    }
  }
  out.stop_t = hi;
  out.contact = bad->kind;
  out.contact_point = bad->point;
  return out;
}

ScanOutcome moving_plane_scan(const TriMesh& mesh, const Vec3& nu, const ScanOptions& options) {
  const TriangleBvh bvh(mesh);
  return moving_plane_scan(bvh, nu, options);
}

SymmetryResult alexandrov_symmetry(const TriangleBvh& bvh, const Vec3& nu_in, double tol,
                                   const ScanOptions& options) {
  const Vec3 nu = unit_direction(nu_in);
  if (options.check_input) check_scan_input(bvh);
  ScanOptions opts = options;
  opts.check_input = false;
  if (opts.surface_tol <= 0.0) opts.surface_tol = default_surface_tol(bvh.mesh());

  SymmetryResult res;
  res.forward = moving_plane_scan(bvh, nu, opts);
  res.backward = moving_plane_scan(bvh, -nu, opts);
  const double t_fwd = res.forward.stop_t;
  const double t_bwd = -res.backward.stop_t;
  res.mismatch = std::abs(t_fwd - t_bwd);
  const double slack = tol + 2.0 * opts.surface_tol;
  const ScanPlane mid{Vec3::Zero(), nu, 0.5 * (t_fwd + t_bwd)};

  for (const auto& v : bvh.mesh().vertices) {
    const Vec3 p = v - 2.0 * mid.signed_distance(v) * nu;
    const auto cp = bvh.closest_point(p);
    res.hausdorff = std::max(res.hausdorff, cp ? cp->distance : 0.0);
  }
  if (res.mismatch <= slack && res.hausdorff <= slack) res.plane = mid;
  return res;
}

SymmetryResult alexandrov_symmetry(const TriMesh& mesh, const Vec3& nu, double tol,
                                   const ScanOptions& options) {
  const TriangleBvh bvh(mesh);
  return alexandrov_symmetry(bvh, nu, tol, options);
}

TriMesh tilted_cylinder_mesh(double radius, double tilt, double height, int n_theta, int n_z) {
  if (!(radius > 0.0) || !(height > 0.0) || n_theta < 8 || n_z < 1 ||
      !(std::abs(tilt) < std::numbers::pi / 2)) {
    throw DomainError("tilted_cylinder_mesh: bad parameters");
  }
  const double ax = radius / std::cos(tilt);
  std::vector<std::vector<Vec3>> rings;
  for (int k = 0; k <= n_z; ++k) {
    const double z = height * k / n_z;
    std::vector<Vec3> ring;
    for (int j = 0; j < n_theta; ++j) {
      const double th = 2.0 * std::numbers::pi * j / n_theta;
      ring.emplace_back(z * std::tan(tilt) + ax * std::cos(th), radius * std::sin(th), z);
    }
    rings.push_back(std::move(ring));
  }
  return tube_mesh(rings, true);
}

std::vector<Vec3> grid_directions() {
  std::vector<Vec3> out;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      for (int k = -1; k <= 1; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        out.push_back(Vec3(i, j, k).normalized());
      }
    }
  }
  return out;
}

}  // namespace wlab
