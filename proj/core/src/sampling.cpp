#include "shapespace/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace shapespace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<std::pair<int, double>>> edge_graph(const TriMesh& m) {
  std::vector<std::vector<std::pair<int, double>>> adj(m.vertex_count());
  auto add = [&](int a, int b) {
    const double w = (m.vertices[a] - m.vertices[b]).norm();
    adj[a].emplace_back(b, w);
    adj[b].emplace_back(a, w);
  };
  for (const Face& t : m.faces) {
    add(t[0], t[1]);
    add(t[1], t[2]);
    add(t[2], t[0]);
  }
  // Dedup parallel edges so Dijkstra touches each neighbor once.
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return adj;
}

// Relaxes `dist` with paths from a new source; only improvements propagate.
void relax_from(const std::vector<std::vector<std::pair<int, double>>>& adj, int source,
                std::vector<double>& dist) {
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  if (dist[source] > 0.0) {
    dist[source] = 0.0;
    pq.emplace(0.0, source);
  }
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      const double nd = d + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.emplace(nd, v);
      }
    }
  }
}

}  // namespace

Vec3 SampleSet::evaluate_source(const TriMesh& m, int i) const {
  const Face& t = m.faces[source_faces[i]];
  const Vec3& b = barycentric[i];
  return b[0] * m.vertices[t[0]] + b[1] * m.vertices[t[1]] + b[2] * m.vertices[t[2]];
}

std::vector<double> graph_geodesics(const TriMesh& m, int source) {
  auto adj = edge_graph(m);
  std::vector<double> dist(m.vertex_count(), kInf);
  relax_from(adj, source, dist);
  return dist;
}

SampleSet farthest_point_sample(const TriMesh& m, int n, std::uint64_t seed) {
  if (n < 1) throw TooManySamplesError("farthest_point_sample: n must be >= 1");
  if (n > m.vertex_count())
    throw TooManySamplesError("farthest_point_sample: n exceeds vertex count");

  const auto adj = edge_graph(m);

  // Connected components over vertices, with aggregate face area.
  std::vector<int> comp(m.vertex_count(), -1);
  int ncomp = 0;
  for (int s = 0; s < m.vertex_count(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& [v, w] : adj[u]) {
        if (comp[v] < 0) {
          comp[v] = ncomp;
          stack.push_back(v);
        }
      }
    }
    ++ncomp;
  }
  std::vector<double> comp_area(ncomp, 0.0);
  for (int f = 0; f < m.face_count(); ++f) comp_area[comp[m.faces[f][0]]] += face_area(m, f);
  std::vector<std::vector<int>> comp_verts(ncomp);
  for (int v = 0; v < m.vertex_count(); ++v) comp_verts[comp[v]].push_back(v);

  // Largest-area component first; quota by largest remainder, capped by the
  // component's vertex count with overflow passed down the order.
  std::vector<int> order(ncomp);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (comp_area[a] != comp_area[b]) return comp_area[a] > comp_area[b];
    return comp_verts[a].front() < comp_verts[b].front();
  });
  const double total_area = std::accumulate(comp_area.begin(), comp_area.end(), 0.0);
  std::vector<int> quota(ncomp, 0);
  if (ncomp == 1) {
    quota[0] = n;
  } else {
    std::vector<double> exact(ncomp), rem(ncomp);
    int assigned = 0;
    for (int c : order) {
      exact[c] = total_area > 0.0 ? n * comp_area[c] / total_area
                                  : double(n) / ncomp;
      quota[c] = static_cast<int>(std::floor(exact[c]));
      rem[c] = exact[c] - quota[c];
      assigned += quota[c];
    }
    std::vector<int> by_rem = order;
    std::stable_sort(by_rem.begin(), by_rem.end(),
                     [&](int a, int b) { return rem[a] > rem[b]; });
    for (int i = 0; assigned < n; i = (i + 1) % ncomp) {
      ++quota[by_rem[i]];
      ++assigned;
    }
    // Cap and push overflow to the next components in area order.
    int overflow = 0;
    for (int c : order) {
      quota[c] += overflow;
      overflow = 0;
      const int cap = static_cast<int>(comp_verts[c].size());
      if (quota[c] > cap) {
        overflow = quota[c] - cap;
        quota[c] = cap;
      }
    }
    for (auto it = order.rbegin(); overflow > 0 && it != order.rend(); ++it) {
      const int cap = static_cast<int>(comp_verts[*it].size());
      const int room = cap - quota[*it];
      const int take = std::min(room, overflow);
      quota[*it] += take;
      overflow -= take;
    }
  }

  SampleSet out;
  out.mesh_id = m.id;
  out.seed = seed;

  // Lowest incident face per vertex for the barycentric source record.
  std::vector<int> vertex_face(m.vertex_count(), -1);
  for (int f = m.face_count() - 1; f >= 0; --f)
    for (int c = 0; c < 3; ++c) vertex_face[m.faces[f][c]] = f;

  std::vector<double> dist(m.vertex_count(), kInf);
  for (int c : order) {
    const int k = quota[c];
    if (k == 0) continue;
    const auto& verts = comp_verts[c];
    std::vector<int> chosen;
    chosen.push_back(verts[seed % verts.size()]);
    relax_from(adj, chosen.back(), dist);
    while (static_cast<int>(chosen.size()) < k) {
      int best = -1;
      double best_d = -1.0;
      for (int v : verts) {
        if (dist[v] > best_d) {
          best_d = dist[v];
          best = v;
        }
      }
      chosen.push_back(best);
      relax_from(adj, best, dist);
    }
    for (int v : chosen) {
      out.vertex_indices.push_back(v);
      out.points.push_back(m.vertices[v]);
      const int f = vertex_face[v];
      out.source_faces.push_back(f);
      Vec3 b = Vec3::Zero();
      for (int corner = 0; corner < 3; ++corner)
        if (m.faces[f][corner] == v) b[corner] = 1.0;
      out.barycentric.push_back(b);
    }
  }
  return out;
}

}  // namespace shapespace
