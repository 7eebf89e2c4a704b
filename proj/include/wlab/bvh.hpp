#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "wlab/mesh.hpp"

namespace wlab {

struct RayHit {
  double t;
  int triangle;
  double u;  // barycentric weight of vertex 1
  double v;  // barycentric weight of vertex 2

  double min_barycentric() const { return std::min({1.0 - u - v, u, v}); }
};

struct ClosestPoint {
  double distance;
  Vec3 point;
  int triangle;
};

/// Axis-aligned bounding-volume hierarchy over the triangles of a mesh, used
/// for line casts, closest-point queries and segment tests.
class TriangleBvh {
 public:
  explicit TriangleBvh(TriMesh mesh);

  const TriMesh& mesh() const { return mesh_; }
  const Aabb& bounds() const { return nodes_.front().box; }
  const Vec3& normal(int tri) const { return normals_[static_cast<std::size_t>(tri)]; }

  /// All intersections of origin + t dir with t in [t_min, t_max], sorted by t.
  /// Hits on shared edges are reported once per incident triangle.
  std::vector<RayHit> intersect(const Vec3& origin, const Vec3& dir,
                                double t_min = -std::numeric_limits<double>::infinity(),
                                double t_max = std::numeric_limits<double>::infinity()) const;

  /// Nearest surface point, or nothing when the surface is farther than max_distance.
  std::optional<ClosestPoint> closest_point(
      const Vec3& p, double max_distance = std::numeric_limits<double>::infinity()) const;

  /// True if the closed segment [a, b] meets a triangle not rejected by skip.
  bool segment_intersects(const Vec3& a, const Vec3& b,
                          const std::function<bool(int)>& skip = {}) const;

  /// Point-in-closed-mesh by ray parity. Rays that hit an edge or vertex, or
  /// graze a face, are retried along other directions.
  bool contains(const Vec3& p) const;

 private:
  struct Node {
    Aabb box;
    int left = -1;
    int right = -1;
    int first = 0;
    int count = 0;
  };

  int build(int first, int count);
  template <class Visit>
  void traverse_line(const Vec3& origin, const Vec3& dir, double t_min, double t_max,
                     Visit&& visit) const;

  TriMesh mesh_;
  std::vector<Vec3> normals_;
  std::vector<int> order_;
  std::vector<Aabb> tri_boxes_;
  std::vector<Vec3> centroids_;
  std::vector<Node> nodes_;
};

/// Pairs of non-adjacent triangles that intersect; empty for embedded meshes.
/// Only the first pair found is returned.
std::optional<std::pair<int, int>> find_self_intersection(const TriangleBvh& bvh);

}  // namespace wlab
