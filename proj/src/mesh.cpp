#include "wlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

std::uint64_t edge_key(int u, int v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

}  // namespace

void compute_boundary_loops(TriMesh& mesh) {
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.triangles.size() * 3);
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int u = t[k];
      const int v = t[(k + 1) % 3];
      if (++directed[edge_key(u, v)] > 1) {
        std::ostringstream os;
        os << "mesh edge (" << u << ", " << v
           << ") is used twice in the same direction (non-manifold or inconsistent winding)";
        throw DomainError(os.str());
      }
    }
  }
  std::unordered_map<int, int> next;
  for (const auto& [key, count] : directed) {
    const int u = static_cast<int>(key >> 32);
    const int v = static_cast<int>(key & 0xffffffffu);
    if (!directed.count(edge_key(v, u))) {
      if (!next.emplace(u, v).second) {
        throw DomainError("mesh boundary is pinched at a vertex");
      }
    }
  }
  mesh.boundary_loops.clear();
  // Deterministic loop order: start from the smallest unvisited vertex.
  std::vector<int> starts;
  starts.reserve(next.size());
  for (const auto& [u, v] : next) starts.push_back(u);
  std::sort(starts.begin(), starts.end());
  std::unordered_map<int, bool> visited;
  for (int s : starts) {
    if (visited[s]) continue;
    std::vector<int> loop;
    int cur = s;
    while (!visited[cur]) {
      visited[cur] = true;
      loop.push_back(cur);
      auto it = next.find(cur);
      if (it == next.end()) throw DomainError("mesh boundary chain is not closed");
      cur = it->second;
    }
    if (cur != s) throw DomainError("mesh boundary chain is not a simple cycle");
    mesh.boundary_loops.push_back(std::move(loop));
  }
}

TriMesh make_mesh(std::vector<Vec3> vertices, std::vector<Tri> triangles) {
  TriMesh m{std::move(vertices), std::move(triangles), {}};
  const int n = static_cast<int>(m.vertices.size());
  for (const auto& t : m.triangles) {
    for (int i : t) {
      if (i < 0 || i >= n) throw DomainError("triangle references a missing vertex");
    }
  }
  compute_boundary_loops(m);
  return m;
}

Vec3 triangle_normal(const TriMesh& mesh, std::size_t tri) {
  const auto& t = mesh.triangles[tri];
  const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                     .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double triangle_area(const TriMesh& mesh, std::size_t tri) {
  const auto& t = mesh.triangles[tri];
  return 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                   .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]])
                   .norm();
}

Vec3 triangle_centroid(const TriMesh& mesh, std::size_t tri) {
  const auto& t = mesh.triangles[tri];
  return (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
}

double mesh_area(const TriMesh& mesh) {
  double a = 0.0;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) a += triangle_area(mesh, i);
  return a;
}

double signed_volume(const TriMesh& mesh) {
  double v = 0.0;
  for (const auto& t : mesh.triangles) {
    v += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
  }
  return v / 6.0;
}

int euler_characteristic(const TriMesh& mesh) {
  std::unordered_map<std::uint64_t, int> edges;
  std::vector<bool> used(mesh.vertices.size(), false);
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int u = t[k];
      const int v = t[(k + 1) % 3];
      used[u] = true;
      edges[edge_key(std::min(u, v), std::max(u, v))]++;
    }
  }
  const auto n_vertices = std::count(used.begin(), used.end(), true);
  return static_cast<int>(n_vertices) - static_cast<int>(edges.size()) +
         static_cast<int>(mesh.triangles.size());
}

bool is_closed(const TriMesh& mesh) {
  if (mesh.triangles.empty()) return false;
  std::unordered_map<std::uint64_t, int> edges;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int u = t[k];
      const int v = t[(k + 1) % 3];
      edges[edge_key(std::min(u, v), std::max(u, v))]++;
    }
  }
  return std::all_of(edges.begin(), edges.end(), [](const auto& e) { return e.second == 2; });
}

double max_edge_length(const TriMesh& mesh) {
  double m = 0.0;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      m = std::max(m, (mesh.vertices[t[k]] - mesh.vertices[t[(k + 1) % 3]]).norm());
    }
  }
  return m;
}

Aabb bounds(const TriMesh& mesh) {
  Aabb b;
  for (const auto& v : mesh.vertices) b.grow(v);
  return b;
}

double estimate_sagitta(const TriMesh& mesh, double crease_angle) {
  std::unordered_map<std::uint64_t, int> first_tri;
  double sag = 0.0;
  auto diameter = [&](std::size_t i) {
    const auto& t = mesh.triangles[i];
    double d = 0.0;
    for (int k = 0; k < 3; ++k) {
      d = std::max(d, (mesh.vertices[t[k]] - mesh.vertices[t[(k + 1) % 3]]).norm());
    }
    return d;
  };
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    for (int k = 0; k < 3; ++k) {
      const int u = t[k];
      const int v = t[(k + 1) % 3];
      const auto key = edge_key(std::min(u, v), std::max(u, v));
      auto [it, inserted] = first_tri.emplace(key, static_cast<int>(i));
      if (inserted) continue;
      const auto j = static_cast<std::size_t>(it->second);
      const double c = std::clamp(triangle_normal(mesh, i).dot(triangle_normal(mesh, j)), -1.0, 1.0);
      const double angle = std::acos(c);
      if (angle > crease_angle) continue;
      const double dc = (triangle_centroid(mesh, i) - triangle_centroid(mesh, j)).norm();
      if (dc <= 0.0) continue;
      const double d = std::max(diameter(i), diameter(j));
      sag = std::max(sag, angle / dc * d * d / 6.0);
    }
  }
  return sag;
}

TriMesh icosphere(int level, double radius, const Vec3& center) {
  if (level < 0 || !(radius > 0.0)) throw DomainError("icosphere: bad level or radius");
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, p, 0}, {1, p, 0},  {-1, -p, 0}, {1, -p, 0},
                         {0, -1, p}, {0, 1, p},  {0, -1, -p}, {0, 1, -p},
                         {p, 0, -1}, {p, 0, 1},  {-p, 0, -1}, {-p, 0, 1}};
  for (auto& x : v) x.normalize();
  std::vector<Tri> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int idx = static_cast<int>(v.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<Tri> nf;
    nf.reserve(f.size() * 4);
    for (const auto& t : f) {
      const int a = midpoint(t[0], t[1]);
      const int b = midpoint(t[1], t[2]);
      const int c = midpoint(t[2], t[0]);
      nf.push_back({t[0], a, c});
      nf.push_back({t[1], b, a});
      nf.push_back({t[2], c, b});
      nf.push_back({a, b, c});
    }
    f = std::move(nf);
  }
  for (auto& x : v) x = center + radius * x;
  return make_mesh(std::move(v), std::move(f));
}

TriMesh fan_cap(const std::vector<Vec3>& loop, const Vec3& center) {
  if (loop.size() < 3) throw DomainError("fan_cap: loop needs at least 3 points");
  std::vector<Vec3> v;
  v.reserve(loop.size() + 1);
  v.push_back(center);
  v.insert(v.end(), loop.begin(), loop.end());
  std::vector<Tri> f;
  const int n = static_cast<int>(loop.size());
  for (int i = 0; i < n; ++i) f.push_back({0, 1 + i, 1 + (i + 1) % n});
  return make_mesh(std::move(v), std::move(f));
}

TriMesh transformed(const TriMesh& mesh, const Eigen::Matrix3d& rotation, const Vec3& shift) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) v = rotation * v + shift;
  return out;
}

TriMesh merged(const TriMesh& a, const TriMesh& b) {
  TriMesh out = a;
  const int off = static_cast<int>(a.vertices.size());
  out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const auto& t : b.triangles) out.triangles.push_back({t[0] + off, t[1] + off, t[2] + off});
  for (const auto& loop : b.boundary_loops) {
    auto shifted = loop;
    for (auto& i : shifted) i += off;
    out.boundary_loops.push_back(std::move(shifted));
  }
  return out;
}

TriMesh welded(const TriMesh& mesh, double tol) {
  struct KeyHash {
    std::size_t operator()(const std::array<long long, 3>& k) const {
      return std::hash<long long>()(k[0] * 73856093LL ^ k[1] * 19349663LL ^ k[2] * 83492791LL);
    }
  };
  std::unordered_map<std::array<long long, 3>, std::vector<int>, KeyHash> grid;
  std::vector<int> remap(mesh.vertices.size());
  std::vector<Vec3> verts;
  const double cell = tol > 0.0 ? tol : 1e-12;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& p = mesh.vertices[i];
    const std::array<long long, 3> c = {static_cast<long long>(std::floor(p.x() / cell)),
                                        static_cast<long long>(std::floor(p.y() / cell)),
                                        static_cast<long long>(std::floor(p.z() / cell))};
    int found = -1;
    for (long long dx = -1; dx <= 1 && found < 0; ++dx) {
      for (long long dy = -1; dy <= 1 && found < 0; ++dy) {
        for (long long dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == grid.end()) continue;
          for (int j : it->second) {
            if ((verts[j] - p).norm() <= tol) {
              found = j;
              break;
            }
          }
        }
      }
    }
    if (found < 0) {
      found = static_cast<int>(verts.size());
      verts.push_back(p);
      grid[c].push_back(found);
    }
    remap[i] = found;
  }
  std::vector<Tri> tris;
  for (const auto& t : mesh.triangles) {
    Tri r = {remap[t[0]], remap[t[1]], remap[t[2]]};
    if (r[0] == r[1] || r[1] == r[2] || r[0] == r[2]) continue;
    tris.push_back(r);
  }
  return make_mesh(std::move(verts), std::move(tris));
}

TriMesh flipped(const TriMesh& mesh) {
  TriMesh out = mesh;
  for (auto& t : out.triangles) std::swap(t[1], t[2]);
  compute_boundary_loops(out);
  return out;
}

void write_obj(std::ostream& out, const TriMesh& mesh) {
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

TriMesh read_obj(std::istream& in) {
  std::vector<Vec3> verts;
  std::vector<Tri> tris;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) {
        throw DomainError("OBJ line " + std::to_string(line_no) + ": bad vertex");
      }
      verts.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        const auto slash = tok.find('/');
        int i = 0;
        try {
          i = std::stoi(tok.substr(0, slash));
        } catch (const std::exception&) {
          throw DomainError("OBJ line " + std::to_string(line_no) + ": bad face index");
        }
        if (i < 0) i = static_cast<int>(verts.size()) + 1 + i;
        idx.push_back(i - 1);
      }
      if (idx.size() < 3) throw DomainError("OBJ line " + std::to_string(line_no) + ": short face");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) tris.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  return make_mesh(std::move(verts), std::move(tris));
}

}  // namespace wlab

namespace wlab {

TriMesh tube_mesh(const std::vector<std::vector<Vec3>>& rings, bool caps) {
  if (rings.size() < 2) throw DomainError("tube_mesh: need at least two rings");
  const int n = static_cast<int>(rings.front().size());
  if (n < 3) throw DomainError("tube_mesh: rings need at least 3 points");
  std::vector<Vec3> verts;
  for (const auto& r : rings) {
    if (static_cast<int>(r.size()) != n) throw DomainError("tube_mesh: ring sizes differ");
    verts.insert(verts.end(), r.begin(), r.end());
  }
  const int m = static_cast<int>(rings.size());
  auto idx = [n](int i, int j) { return i * n + (j % n); };
  std::vector<Tri> tris;
  tris.reserve(static_cast<std::size_t>(2 * n * m + 2 * n));
  for (int i = 0; i + 1 < m; ++i) {
    for (int j = 0; j < n; ++j) {
      tris.push_back({idx(i, j), idx(i, j + 1), idx(i + 1, j)});
      tris.push_back({idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j)});
    }
  }
  if (caps) {
    auto centroid = [](const std::vector<Vec3>& r) {
      Vec3 c = Vec3::Zero();
      for (const auto& p : r) c += p;
      return Vec3(c / static_cast<double>(r.size()));
    };
    const int bottom = static_cast<int>(verts.size());
    verts.push_back(centroid(rings.front()));
    const int top = static_cast<int>(verts.size());
    verts.push_back(centroid(rings.back()));
    for (int j = 0; j < n; ++j) {
      tris.push_back({bottom, idx(0, j + 1), idx(0, j)});
      tris.push_back({top, idx(m - 1, j), idx(m - 1, j + 1)});
    }
  }
  return make_mesh(std::move(verts), std::move(tris));
}

}  // namespace wlab
