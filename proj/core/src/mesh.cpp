#include "shapespace/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

namespace shapespace {

double face_area(const TriMesh& m, int f) {
  const Face& t = m.faces[f];
  const Vec3 e1 = m.vertices[t[1]] - m.vertices[t[0]];
  const Vec3 e2 = m.vertices[t[2]] - m.vertices[t[0]];
  return 0.5 * e1.cross(e2).norm();
}

Vec3 face_normal(const TriMesh& m, int f) {
  const Face& t = m.faces[f];
  const Vec3 e1 = m.vertices[t[1]] - m.vertices[t[0]];
  const Vec3 e2 = m.vertices[t[2]] - m.vertices[t[0]];
  Vec3 n = e1.cross(e2);
  const double len = n.norm();
  if (len <= 0.0) return Vec3::Zero();
  return n / len;
}

double surface_area(const TriMesh& m) {
  double a = 0.0;
  for (int f = 0; f < m.face_count(); ++f) a += face_area(m, f);
  return a;
}

Vec3 area_centroid(const TriMesh& m) {
  Vec3 c = Vec3::Zero();
  double a = 0.0;
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& t = m.faces[f];
    const double af = face_area(m, f);
    c += af / 3.0 * (m.vertices[t[0]] + m.vertices[t[1]] + m.vertices[t[2]]);
    a += af;
  }
  if (a <= 0.0) return Vec3::Zero();
  return c / a;
}

double bbox_diagonal(const TriMesh& m) {
  if (m.vertices.empty()) return 0.0;
  Vec3 lo = m.vertices.front(), hi = m.vertices.front();
  for (const Vec3& v : m.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

TriMesh normalize_mesh(const TriMesh& m) {
  if (m.faces.empty()) throw EmptyMeshError("normalize_mesh: mesh has no faces");
  const double area = surface_area(m);
  if (area <= 0.0) throw EmptyMeshError("normalize_mesh: zero surface area");
  const Vec3 c = area_centroid(m);
  const double s = 1.0 / std::sqrt(area);
  TriMesh out = m;
  for (Vec3& v : out.vertices) v = (v - c) * s;
  return out;
}

std::vector<Vec3> vertex_normals(const TriMesh& m) {
  std::vector<Vec3> normals(m.vertices.size(), Vec3::Zero());
  std::vector<char> touched(m.vertices.size(), 0);
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& t = m.faces[f];
    const Vec3 fn = face_normal(m, f);
    for (int c = 0; c < 3; ++c) {
      const Vec3& p = m.vertices[t[c]];
      const Vec3 a = (m.vertices[t[(c + 1) % 3]] - p).normalized();
      const Vec3 b = (m.vertices[t[(c + 2) % 3]] - p).normalized();
      const double cosang = std::clamp(a.dot(b), -1.0, 1.0);
      normals[t[c]] += std::acos(cosang) * fn;
      touched[t[c]] = 1;
    }
  }
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (!touched[i])
      throw IsolatedVertexError("vertex_normals: vertex " + std::to_string(i) +
                                " has no incident face");
    const double len = normals[i].norm();
    if (len > 0.0) normals[i] /= len;
  }
  return normals;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

using EdgeKey = std::pair<int, int>;

EdgeKey undirected(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

}  // namespace

DiagnosticsReport validate_mesh(const TriMesh& m) {
  DiagnosticsReport r;

  // Duplicate vertices: exact coordinate match with an earlier vertex.
  {
    std::map<std::array<double, 3>, int> seen;
    for (int i = 0; i < m.vertex_count(); ++i) {
      std::array<double, 3> key{m.vertices[i].x(), m.vertices[i].y(), m.vertices[i].z()};
      auto [it, inserted] = seen.emplace(key, i);
      if (!inserted) ++r.duplicate_vertex_count;
    }
  }

  // Edge usage. Directed uses detect orientation conflicts; total uses > 2
  // flag non-manifold fans.
  std::map<EdgeKey, int> use_count;
  std::map<EdgeKey, int> same_dir;  // max directed multiplicity per undirected edge
  std::map<EdgeKey, int> dir_count_fwd;
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& t = m.faces[f];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || face_area(m, f) == 0.0) {
      ++r.degenerate_face_count;
    }
    for (int c = 0; c < 3; ++c) {
      const int a = t[c], b = t[(c + 1) % 3];
      if (a == b) continue;
      const EdgeKey k = undirected(a, b);
      ++use_count[k];
      int& fwd = dir_count_fwd[k];
      if (a < b) ++fwd;
      int& sd = same_dir[k];
      const int rev = use_count[k] - fwd;
      sd = std::max(fwd, rev);
    }
  }
  for (const auto& [k, uses] : use_count) {
    if (uses > 2 || same_dir[k] >= 2) ++r.non_manifold_edge_count;
  }

  // Boundary loops: connected components of the graph of single-use edges.
  {
    std::vector<EdgeKey> boundary;
    for (const auto& [k, uses] : use_count)
      if (uses == 1) boundary.push_back(k);
    if (!boundary.empty()) {
      UnionFind uf(m.vertex_count());
      for (const auto& [a, b] : boundary) uf.unite(a, b);
      std::vector<int> roots;
      for (const auto& [a, b] : boundary) {
        roots.push_back(uf.find(a));
      }
      std::sort(roots.begin(), roots.end());
      roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
      r.boundary_loop_count = static_cast<std::int64_t>(roots.size());
    }
  }

  // Connected components over all vertices; isolated vertices count alone.
  {
    UnionFind uf(m.vertex_count());
    for (const Face& t : m.faces) {
      uf.unite(t[0], t[1]);
      uf.unite(t[1], t[2]);
    }
    std::vector<int> roots(m.vertex_count());
    for (int i = 0; i < m.vertex_count(); ++i) roots[i] = uf.find(i);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    r.connected_component_count = static_cast<std::int64_t>(roots.size());
  }

  return r;
}

std::string diagnostics_to_json(const DiagnosticsReport& r) {
  std::ostringstream os;
  os << "{"
     << "\"degenerate_face_count\":" << r.degenerate_face_count << ","
     << "\"duplicate_vertex_count\":" << r.duplicate_vertex_count << ","
     << "\"boundary_loop_count\":" << r.boundary_loop_count << ","
     << "\"non_manifold_edge_count\":" << r.non_manifold_edge_count << ","
     << "\"connected_component_count\":" << r.connected_component_count << "}";
  return os.str();
}

}  // namespace shapespace
