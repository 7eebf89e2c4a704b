#include "wlab/bvh.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

constexpr int kLeafSize = 4;
constexpr double kBaryEps = 1e-12;

// Two-sided Moller-Trumbore.
bool intersect_triangle(const Vec3& o, const Vec3& d, const Vec3& p0, const Vec3& p1,
                        const Vec3& p2, double& t, double& u, double& v) {
  const Vec3 e1 = p1 - p0;
  const Vec3 e2 = p2 - p0;
  const Vec3 pv = d.cross(e2);
  const double det = e1.dot(pv);
  const double scale = e1.norm() * e2.norm() * d.norm();
  if (std::abs(det) <= 1e-15 * scale) return false;
  const double inv = 1.0 / det;
  const Vec3 tv = o - p0;
  u = tv.dot(pv) * inv;
  if (u < -kBaryEps || u > 1.0 + kBaryEps) return false;
  const Vec3 qv = tv.cross(e1);
  v = d.dot(qv) * inv;
  if (v < -kBaryEps || u + v > 1.0 + kBaryEps) return false;
  t = e2.dot(qv) * inv;
  return true;
}

bool line_box(const Aabb& b, const Vec3& o, const Vec3& d, double t_min, double t_max) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-300) {
      if (o[i] < b.lo[i] || o[i] > b.hi[i]) return false;
      continue;
    }
    const double inv = 1.0 / d[i];
    double t0 = (b.lo[i] - o[i]) * inv;
    double t1 = (b.hi[i] - o[i]) * inv;
    if (t0 > t1) std::swap(t0, t1);
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
    if (t_min > t_max) return false;
  }
  return true;
}

double box_distance_sq(const Aabb& b, const Vec3& p) {
  const Vec3 q = p.cwiseMax(b.lo).cwiseMin(b.hi);
  return (q - p).squaredNorm();
}

// Ericson, Real-Time Collision Detection, 5.1.5.
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + d1 / (d1 - d3) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

TriangleBvh::TriangleBvh(TriMesh mesh) : mesh_(std::move(mesh)) {
  if (mesh_.triangles.empty()) throw DomainError("TriangleBvh: empty mesh");
  const std::size_t n = mesh_.triangles.size();
  normals_.resize(n);
  tri_boxes_.resize(n);
  centroids_.resize(n);
  order_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    normals_[i] = triangle_normal(mesh_, i);
    for (int k = 0; k < 3; ++k) tri_boxes_[i].grow(mesh_.vertices[mesh_.triangles[i][k]]);
    centroids_[i] = triangle_centroid(mesh_, i);
    order_[i] = static_cast<int>(i);
  }
  nodes_.reserve(2 * n / kLeafSize + 1);
  build(0, static_cast<int>(n));
}

int TriangleBvh::build(int first, int count) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb box, cbox;
  for (int i = first; i < first + count; ++i) {
    box.grow(tri_boxes_[order_[i]]);
    cbox.grow(centroids_[order_[i]]);
  }
  nodes_[idx].box = box;
  if (count <= kLeafSize) {
    nodes_[idx].first = first;
    nodes_[idx].count = count;
    return idx;
  }
  int axis = 0;
  const Vec3 ext = cbox.extent();
  if (ext[1] > ext[axis]) axis = 1;
  if (ext[2] > ext[axis]) axis = 2;
  const int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                   [&](int a, int b) { return centroids_[a][axis] < centroids_[b][axis]; });
  const int left = build(first, mid - first);
  const int right = build(mid, first + count - mid);
  nodes_[idx].left = left;
  nodes_[idx].right = right;
  return idx;
}

template <class Visit>
void TriangleBvh::traverse_line(const Vec3& origin, const Vec3& dir, double t_min, double t_max,
                                Visit&& visit) const {
  std::array<int, 128> stack{};
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!line_box(node.box, origin, dir, t_min, t_max)) continue;
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) visit(order_[i]);
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
}

std::vector<RayHit> TriangleBvh::intersect(const Vec3& origin, const Vec3& dir, double t_min,
                                           double t_max) const {
  std::vector<RayHit> hits;
  traverse_line(origin, dir, t_min, t_max, [&](int tri) {
    const auto& t = mesh_.triangles[tri];
    double tt, u, v;
    if (intersect_triangle(origin, dir, mesh_.vertices[t[0]], mesh_.vertices[t[1]],
                           mesh_.vertices[t[2]], tt, u, v) &&
        tt >= t_min && tt <= t_max) {
      hits.push_back({tt, tri, u, v});
    }
  });
  std::sort(hits.begin(), hits.end(), [](const RayHit& a, const RayHit& b) {
    return a.t < b.t || (a.t == b.t && a.triangle < b.triangle);
  });
  return hits;
}

std::optional<ClosestPoint> TriangleBvh::closest_point(const Vec3& p, double max_distance) const {
  double best_sq = max_distance * max_distance;
  std::optional<ClosestPoint> best;
  std::array<int, 128> stack{};
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_distance_sq(node.box, p) > best_sq) continue;
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int tri = order_[i];
        const auto& t = mesh_.triangles[tri];
        const Vec3 q = closest_on_triangle(p, mesh_.vertices[t[0]], mesh_.vertices[t[1]],
                                           mesh_.vertices[t[2]]);
        const double d2 = (q - p).squaredNorm();
        if (d2 <= best_sq) {
          best_sq = d2;
          best = ClosestPoint{std::sqrt(d2), q, tri};
        }
      }
    } else {
      // Visit the nearer child first.
      const double dl = box_distance_sq(nodes_[node.left].box, p);
      const double dr = box_distance_sq(nodes_[node.right].box, p);
      if (dl < dr) {
        stack[top++] = node.right;
        stack[top++] = node.left;
      } else {
        stack[top++] = node.left;
        stack[top++] = node.right;
      }
    }
  }
  return best;
}

bool TriangleBvh::segment_intersects(const Vec3& a, const Vec3& b,
                                     const std::function<bool(int)>& skip) const {
  const Vec3 d = b - a;
  bool found = false;
  traverse_line(a, d, 0.0, 1.0, [&](int tri) {
    if (found || (skip && skip(tri))) return;
    const auto& t = mesh_.triangles[tri];
    double tt, u, v;
    if (intersect_triangle(a, d, mesh_.vertices[t[0]], mesh_.vertices[t[1]], mesh_.vertices[t[2]],
                           tt, u, v) &&
        tt >= 0.0 && tt <= 1.0) {
      found = true;
    }
  });
  return found;
}

bool TriangleBvh::contains(const Vec3& p) const {
  static const std::array<Vec3, 8> kDirections = {
      Vec3(0.5773, 0.6123, 0.5400).normalized(),  Vec3(-0.3182, 0.8017, -0.5061).normalized(),
      Vec3(0.7411, -0.2213, 0.6338).normalized(), Vec3(-0.6650, -0.5291, 0.5271).normalized(),
      Vec3(0.1147, -0.9023, -0.4155).normalized(), Vec3(0.8830, 0.3721, -0.2862).normalized(),
      Vec3(-0.2377, 0.1509, 0.9595).normalized(), Vec3(-0.9173, 0.3061, 0.2547).normalized()};
  const double diam = bounds().diameter();
  int votes_inside = 0;
  int votes = 0;
  for (const auto& d : kDirections) {
    const auto hits = intersect(p, d, 0.0);
    bool clean = true;
    for (const auto& h : hits) {
      if (h.min_barycentric() < 1e-9 || h.t < 1e-12 * diam ||
          std::abs(normals_[h.triangle].dot(d)) < 1e-9) {
        clean = false;
        break;
      }
    }
    const bool inside = hits.size() % 2 == 1;
    if (clean) return inside;
    votes_inside += inside ? 1 : 0;
    ++votes;
  }
  return 2 * votes_inside > votes;
}

std::optional<std::pair<int, int>> find_self_intersection(const TriangleBvh& bvh) {
  const auto& m = bvh.mesh();
  for (std::size_t i = 0; i < m.triangles.size(); ++i) {
    const auto& t = m.triangles[i];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k];
      const int b = t[(k + 1) % 3];
      std::optional<int> other;
      const auto skip = [&](int tri) {
        const auto& s = m.triangles[tri];
        return std::find(s.begin(), s.end(), a) != s.end() ||
               std::find(s.begin(), s.end(), b) != s.end();
      };
      // Report the first offending triangle found for this edge.
      const Vec3& pa = m.vertices[a];
      const Vec3& pb = m.vertices[b];
      if (bvh.segment_intersects(pa, pb, skip)) {
        const auto hits = bvh.intersect(pa, pb - pa, 0.0, 1.0);
        for (const auto& h : hits) {
          if (!skip(h.triangle)) {
            other = h.triangle;
            break;
          }
        }
        return std::make_pair(static_cast<int>(i), other.value_or(-1));
      }
    }
  }
  return std::nullopt;
}

}  // namespace wlab
