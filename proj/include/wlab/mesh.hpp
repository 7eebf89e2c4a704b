#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace wlab {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Tri = std::array<int, 3>;

/// Indexed triangle mesh. Triangles are wound counter-clockwise seen from the
/// side their normal points to. boundary_loops holds each boundary cycle as
/// vertex indices in the direction of its (unique) boundary half-edges.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Tri> triangles;
  std::vector<std::vector<int>> boundary_loops;

  bool empty() const { return triangles.empty(); }
};

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void grow(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void grow(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  Vec3 extent() const { return hi - lo; }
  Vec3 center() const { return 0.5 * (lo + hi); }
  double diameter() const { return extent().norm(); }
};

/// Rebuilds mesh.boundary_loops from the half-edge structure. Throws
/// DomainError on non-manifold edges or inconsistent winding.
void compute_boundary_loops(TriMesh& mesh);

TriMesh make_mesh(std::vector<Vec3> vertices, std::vector<Tri> triangles);

Vec3 triangle_normal(const TriMesh& mesh, std::size_t tri);  // unit
double triangle_area(const TriMesh& mesh, std::size_t tri);
Vec3 triangle_centroid(const TriMesh& mesh, std::size_t tri);

double mesh_area(const TriMesh& mesh);
/// Divergence-theorem volume; positive for closed meshes with outward winding.
double signed_volume(const TriMesh& mesh);
int euler_characteristic(const TriMesh& mesh);
bool is_closed(const TriMesh& mesh);
double max_edge_length(const TriMesh& mesh);
Aabb bounds(const TriMesh& mesh);

/// Largest estimated gap between the facets and the smooth surface they
/// approximate, from dihedral angles. Edges sharper than crease_angle (radians)
/// are treated as genuine corners and skipped.
double estimate_sagitta(const TriMesh& mesh, double crease_angle = 0.5);

/// Sphere from a subdivided icosahedron, outward winding.
TriMesh icosphere(int level, double radius, const Vec3& center = Vec3::Zero());

/// Fan triangulation of a closed polygon to a center point. The loop order
/// determines the normal (right-hand rule).
TriMesh fan_cap(const std::vector<Vec3>& loop, const Vec3& center);

TriMesh transformed(const TriMesh& mesh, const Eigen::Matrix3d& rotation, const Vec3& shift);
TriMesh merged(const TriMesh& a, const TriMesh& b);
/// Merges vertices closer than tol and drops triangles that collapse.
TriMesh welded(const TriMesh& mesh, double tol);
TriMesh flipped(const TriMesh& mesh);

void write_obj(std::ostream& out, const TriMesh& mesh);
/// Reads `v` and `f` records (1-based, polygons fan-triangulated, texture and
/// normal indices ignored).
TriMesh read_obj(std::istream& in);

}  // namespace wlab

namespace wlab {

/// Triangulated tube through a stack of rings with equal point counts; ring
/// points are ordered counter-clockwise about the +z direction and the stack
/// rises. With caps, both ends are closed by fans to the ring centroids.
/// Normals point outward.
TriMesh tube_mesh(const std::vector<std::vector<Vec3>>& rings, bool caps);

}  // namespace wlab
