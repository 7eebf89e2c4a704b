#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "wlab/bvh.hpp"
#include "wlab/mesh.hpp"

namespace wlab {

/// The plane {x : <x - base, normal> = offset}, i.e. base + offset * normal
/// translated along its normal.
struct ScanPlane {
  Vec3 base = Vec3::Zero();
  Vec3 normal = Vec3::UnitX();
  double offset = 0.0;

  Vec3 origin() const { return base + offset * normal; }
  double signed_distance(const Vec3& x) const { return (x - base).dot(normal) - offset; }
};

ScanPlane make_plane(const Vec3& base, const Vec3& normal, double offset = 0.0);

struct SurfaceHit {
  double t;
  Vec3 normal;
  bool tangential = false;
};

/// Anything a line can be cast against.
class RaySurface {
 public:
  virtual ~RaySurface() = default;
  /// Intersections of origin + t dir (all t), sorted by t.
  virtual std::vector<SurfaceHit> line_hits(const Vec3& origin, const Vec3& dir) const = 0;
  virtual Aabb bounds() const = 0;
};

/// Mesh-backed surface. Coincident hits on a shared edge are merged: one
/// crossing when the incident faces agree on the side, a tangential touch
/// otherwise.
class MeshSurface : public RaySurface {
 public:
  explicit MeshSurface(TriMesh mesh);
  explicit MeshSurface(std::shared_ptr<const TriangleBvh> bvh);
  std::vector<SurfaceHit> line_hits(const Vec3& origin, const Vec3& dir) const override;
  Aabb bounds() const override { return bvh_->bounds(); }
  const TriangleBvh& bvh() const { return *bvh_; }

 private:
  std::shared_ptr<const TriangleBvh> bvh_;
};

class SphereSurface : public RaySurface {
 public:
  SphereSurface(const Vec3& center, double radius);
  std::vector<SurfaceHit> line_hits(const Vec3& origin, const Vec3& dir) const override;
  Aabb bounds() const override;

 private:
  Vec3 center_;
  double radius_;
};

/// Circular cylinder around an arbitrary axis, truncated to z_lo <= z <= z_hi
/// (world heights). A tilted axis gives elliptic horizontal sections.
class CylinderSurface : public RaySurface {
 public:
  CylinderSurface(const Vec3& axis_point, const Vec3& axis_dir, double radius, double z_lo,
                  double z_hi);
  std::vector<SurfaceHit> line_hits(const Vec3& origin, const Vec3& dir) const override;
  Aabb bounds() const override;

 private:
  Vec3 point_;
  Vec3 dir_;
  double radius_;
  double z_lo_;
  double z_hi_;
};

constexpr double kTangencyThreshold = 1e-6;

/// Alexandrov function at p on the plane: along p + t nu, t1 is the last hit
/// (largest t); returns t1 if the line is tangent there, else the midpoint of
/// t1 and the next hit below it. Nothing if the line misses the surface.
std::optional<double> alpha1(const RaySurface& surface, const ScanPlane& plane, const Vec3& p,
                             double tangency = kTangencyThreshold);

struct AlphaSample {
  double height = 0.0;
  std::optional<double> alpha;
  int rays_hit = 0;
};

/// Sup of alpha1 over n_rays points of the horizontal line plane ∩ {z = height}.
/// The plane must be vertical. The lateral range defaults to the surface bounds.
AlphaSample alpha(const RaySurface& surface, const ScanPlane& plane, double height, int n_rays,
                  std::optional<std::pair<double, double>> lateral_range = std::nullopt);

struct AlphaTable {
  ScanPlane plane;
  std::vector<double> heights;
  std::vector<std::optional<double>> alpha;
};

AlphaTable alpha_table(const RaySurface& surface, const ScanPlane& plane,
                       const std::vector<double>& heights, int n_rays);

struct AlphaLimitRow {
  double height;
  double alpha;
  double error;  // |alpha - d|
  double bound;
  bool within;
};

struct AlphaLimitReport {
  std::vector<AlphaLimitRow> rows;
  bool passed = false;
};

/// Compares alpha(t_k) against the axis distance d under the envelope
/// bound(t_k). Heights must be increasing.
AlphaLimitReport alpha_limit_check(const RaySurface& surface, const ScanPlane& plane,
                                   const std::vector<double>& heights, double d, int n_rays,
                                   const std::function<double(double)>& bound);

/// Reflection across the plane; winding is reversed so normals stay outward.
TriMesh reflect_through_plane(const TriMesh& mesh, const ScanPlane& plane);

/// Moves every vertex horizontally away from the vertical axis through
/// (axis_x, axis_y) by amplitude(z, theta).
TriMesh perturb_radially(const TriMesh& mesh, double axis_x, double axis_y,
                         const std::function<double(double, double)>& amplitude);

enum class ContactKind { kInterior, kBoundary, kGraphViolation, kNone };

const char* to_string(ContactKind kind);

struct ScanOptions {
  double step = 0.0;          // <= 0: bounding-box extent along nu / 200
  double tol = 1e-5;          // bisection tolerance on the stop parameter
  double surface_tol = -1.0;  // <= 0: twice the estimated facet sagitta
  double normal_tol = 1e-3;   // graph test: facets below the plane need <n, nu> <= normal_tol
  bool check_input = true;    // closedness and self-intersection checks
};

/// Planes are {x : <x, nu> = t}.
struct ScanOutcome {
  double first_touch = 0.0;
  double stop_t = 0.0;
  ContactKind contact = ContactKind::kNone;
  std::optional<Vec3> contact_point;
  double surface_tol = 0.0;
};

/// Moving-plane procedure in direction nu on a closed embedded mesh. At each
/// plane position the part behind the plane is reflected and checked to lie
/// inside the mesh (ray parity plus distance, with surface_tol slack) and to
/// be a graph over the plane (facet normals). The first failing position is
/// refined by bisection.
ScanOutcome moving_plane_scan(const TriangleBvh& bvh, const Vec3& nu,
                              const ScanOptions& options = {});
ScanOutcome moving_plane_scan(const TriMesh& mesh, const Vec3& nu, const ScanOptions& options = {});

struct SymmetryResult {
  std::optional<ScanPlane> plane;  // {<x, nu> = offset} with base at the origin
  ScanOutcome forward;
  ScanOutcome backward;
  double mismatch = 0.0;   // |t_forward + t_backward|
  double hausdorff = 0.0;  // max distance of reflected vertices to the mesh
};

/// Runs the scan in +nu and -nu; a common stop plane whose reflection maps the
/// mesh onto itself (within tolerance) is an Alexandrov symmetry plane.
SymmetryResult alexandrov_symmetry(const TriangleBvh& bvh, const Vec3& nu, double tol,
                                   const ScanOptions& options = {});
SymmetryResult alexandrov_symmetry(const TriMesh& mesh, const Vec3& nu, double tol,
                                   const ScanOptions& options = {});

/// Closed test shape: circular cylinder of the given radius whose axis is
/// tilted by `tilt` radians from e3 towards e1, cut by z = 0 and z = height and
/// capped by the (elliptic) sections.
TriMesh tilted_cylinder_mesh(double radius, double tilt, double height, int n_theta, int n_z);

/// The 26 directions of {-1, 0, 1}^3 \ {0}, normalized.
std::vector<Vec3> grid_directions();

}  // namespace wlab
