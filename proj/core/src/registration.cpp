#include "shapespace/registration.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace shapespace {

RigidMotion RigidMotion::inverse() const {
  RigidMotion inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(rotation.transpose() * translation);
  return inv;
}

RigidMotion compose(const RigidMotion& a, const RigidMotion& b) {
  RigidMotion out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

CorrespondenceMap CorrespondenceMap::inverse() const {
  CorrespondenceMap inv;
  inv.from_id = to_id;
  inv.to_id = from_id;
  inv.assignment.resize(assignment.size());
  for (int i = 0; i < size(); ++i) inv.assignment[assignment[i]] = i;
  return inv;
}

CorrespondenceMap CorrespondenceMap::identity(const std::string& from, const std::string& to,
                                              int n) {
  CorrespondenceMap m;
  m.from_id = from;
  m.to_id = to;
  m.assignment.resize(n);
  std::iota(m.assignment.begin(), m.assignment.end(), 0);
  return m;
}

CorrespondenceMap compose(const CorrespondenceMap& ij, const CorrespondenceMap& jk) {
  if (ij.size() != jk.size())
    throw LengthMismatchError("compose: correspondence maps of different size");
  CorrespondenceMap out;
  out.from_id = ij.from_id;
  out.to_id = jk.to_id;
  out.assignment.resize(ij.assignment.size());
  for (int i = 0; i < ij.size(); ++i) out.assignment[i] = jk.assignment[ij.assignment[i]];
  return out;
}

KabschResult kabsch(const LandmarkPairs& pairs) {
  const auto n = pairs.source.size();
  if (n != pairs.target.size())
    throw LengthMismatchError("kabsch: source/target length mismatch");
  if (n < 3) throw LengthMismatchError("kabsch: need at least 3 pairs");

  Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    ca += pairs.source[i];
    cb += pairs.target[i];
  }
  ca /= double(n);
  cb /= double(n);

  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i)
    H += (pairs.source[i] - ca) * (pairs.target[i] - cb).transpose();

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d U = svd.matrixU(), V = svd.matrixV();
  Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
  if ((V * U.transpose()).determinant() < 0.0) S(2, 2) = -1.0;

  KabschResult res;
  res.motion.rotation = V * S * U.transpose();
  res.motion.translation = cb - res.motion.rotation * ca;

  const auto& sv = svd.singularValues();
  res.degenerate = sv(1) <= 1e-12 * std::max(1.0, sv(0));

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    ss += (res.motion.apply(pairs.source[i]) - pairs.target[i]).squaredNorm();
  res.residual = std::sqrt(ss / double(n));
  return res;
}

double procrustes_distance(const LandmarkPairs& pairs) { return kabsch(pairs).residual; }

namespace {

// Orthonormal right-handed frame of descending-eigenvalue principal axes.
struct PrincipalFrame {
  Eigen::Matrix3d axes;  // columns
  Vec3 values;
  Vec3 centroid;
};

PrincipalFrame frame_from_moments(const Eigen::Matrix3d& cov, const Vec3& centroid) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  PrincipalFrame f;
  f.centroid = centroid;
  // SelfAdjointEigenSolver sorts ascending; flip to descending.
  for (int k = 0; k < 3; ++k) {
    f.values[k] = es.eigenvalues()(2 - k);
    f.axes.col(k) = es.eigenvectors().col(2 - k);
  }
  // Deterministic sign: largest-magnitude entry positive.
  for (int k = 0; k < 2; ++k) {
    int arg = 0;
    f.axes.col(k).cwiseAbs().maxCoeff(&arg);
    if (f.axes(arg, k) < 0.0) f.axes.col(k) = -f.axes.col(k);
  }
  f.axes.col(2) = f.axes.col(0).cross(f.axes.col(1));
  return f;
}

PrincipalFrame point_frame(const std::vector<Vec3>& pts) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : pts) c += p;
  c /= double(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& p : pts) cov += (p - c) * (p - c).transpose();
  cov /= double(pts.size());
  return frame_from_moments(cov, c);
}

// Exact surface integral of (x - c)(x - c)^T over all triangles.
PrincipalFrame mesh_frame(const TriMesh& m) {
  const Vec3 c = area_centroid(m);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double total = 0.0;
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& t = m.faces[f];
    const double a = face_area(m, f);
    const Vec3 p0 = m.vertices[t[0]] - c, p1 = m.vertices[t[1]] - c,
               p2 = m.vertices[t[2]] - c;
    const Vec3 s = p0 + p1 + p2;
    cov += a / 12.0 *
           (p0 * p0.transpose() + p1 * p1.transpose() + p2 * p2.transpose() +
            s * s.transpose());
    total += a;
  }
  if (total <= 0.0) throw EmptyMeshError("pca_align: zero surface area");
  return frame_from_moments(cov / total, c);
}

constexpr int kProperSigns[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};

std::array<RigidMotion, 4> candidates_from_frames(const PrincipalFrame& fa,
                                                  const PrincipalFrame& fb) {
  std::array<RigidMotion, 4> out;
  for (int k = 0; k < 4; ++k) {
    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
    for (int d = 0; d < 3; ++d) S(d, d) = kProperSigns[k][d];
    out[k].rotation = fb.axes * S * fa.axes.transpose();
    out[k].translation = fb.centroid - out[k].rotation * fa.centroid;
  }
  return out;
}

double assignment_rms(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                      const RigidMotion& motion) {
  const int n = static_cast<int>(a.size());
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i) {
    const Vec3 p = motion.apply(a[i]);
    for (int j = 0; j < n; ++j) cost(i, j) = (p - b[j]).squaredNorm();
  }
  const auto sigma = solve_assignment(cost);
  double ss = 0.0;
  for (int i = 0; i < n; ++i) ss += cost(i, sigma[i]);
  return std::sqrt(ss / n);
}

}  // namespace

std::array<RigidMotion, 4> pca_candidates(const std::vector<Vec3>& a,
                                          const std::vector<Vec3>& b) {
  return candidates_from_frames(point_frame(a), point_frame(b));
}

PcaAlignResult pca_align(const TriMesh& a, const TriMesh& b) {
  const PrincipalFrame fa = mesh_frame(a), fb = mesh_frame(b);
  const auto cands = candidates_from_frames(fa, fb);

  const int ns = std::min({64, a.vertex_count(), b.vertex_count()});
  const SampleSet sa = farthest_point_sample(a, ns, 0);
  const SampleSet sb = farthest_point_sample(b, ns, 0);

  PcaAlignResult best;
  best.score = std::numeric_limits<double>::infinity();
  for (const RigidMotion& cand : cands) {
    const double score = assignment_rms(sa.points, sb.points, cand);
    if (score < best.score) {
      best.score = score;
      best.motion = cand;
    }
  }
  auto near_equal = [](double x, double y) { return std::abs(x - y) < 1e-9; };
  best.ambiguous = near_equal(fa.values[0], fa.values[1]) ||
                   near_equal(fa.values[1], fa.values[2]) ||
                   near_equal(fb.values[0], fb.values[1]) ||
                   near_equal(fb.values[1], fb.values[2]);
  return best;
}

namespace {

double mean_sq(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
               const std::vector<int>& sigma, const RigidMotion& motion) {
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    ss += (motion.apply(a[i]) - b[sigma[i]]).squaredNorm();
  return ss / double(a.size());
}

}  // namespace

DiscreteCpResult discrete_cp(const SampleSet& a, const SampleSet& b, const RigidMotion& init,
                             int iters) {
  const int n = a.size();
  if (n != b.size())
    throw LengthMismatchError("discrete_cp: sample sets must have equal size");

  DiscreteCpResult res;
  res.motion = init;
  std::vector<int> sigma;
  Eigen::MatrixXd cost(n, n);

  for (int it = 0; it < iters; ++it) {
    for (int i = 0; i < n; ++i) {
      const Vec3 p = res.motion.apply(a.points[i]);
      for (int j = 0; j < n; ++j) cost(i, j) = (p - b.points[j]).squaredNorm();
    }
    std::vector<int> next = solve_assignment(cost);
    if (!sigma.empty() && next == sigma) {
      res.converged = true;
      break;
    }
    sigma = std::move(next);
    res.objective_trace.push_back(mean_sq(a.points, b.points, sigma, res.motion));

    LandmarkPairs pairs;
    pairs.source = a.points;
    pairs.target.resize(n);
    for (int i = 0; i < n; ++i) pairs.target[i] = b.points[sigma[i]];
    res.motion = kabsch(pairs).motion;
    res.objective_trace.push_back(mean_sq(a.points, b.points, sigma, res.motion));
  }

  res.map.from_id = a.mesh_id;
  res.map.to_id = b.mesh_id;
  res.map.assignment = sigma;
  res.distance = std::sqrt(res.objective_trace.empty() ? 0.0 : res.objective_trace.back());
  return res;
}

DiscreteCpResult discrete_cp_multistart(const SampleSet& a, const SampleSet& b,
                                        const std::vector<RigidMotion>& inits, int iters) {
  DiscreteCpResult best;
  best.distance = std::numeric_limits<double>::infinity();
  for (const RigidMotion& init : inits) {
    DiscreteCpResult r = discrete_cp(a, b, init, iters);
    if (r.distance < best.distance) best = std::move(r);
  }
  return best;
}

DiscreteCpResult cp_align(const SampleSet& a, const SampleSet& b, int iters) {
  const auto cands = pca_candidates(a.points, b.points);
  return discrete_cp_multistart(a, b, {cands.begin(), cands.end()}, iters);
}

const PairwiseAlignment* PairwiseResult::find(int from, int to) const {
  for (const PairwiseAlignment& p : pairs)
    if (p.from == from && p.to == to) return &p;
  return nullptr;
}

PairwiseResult cp_distance_graph(const std::vector<SampleSet>& samples, int iters, int jobs) {
  const int k = static_cast<int>(samples.size());
  PairwiseResult out;
  out.graph.ids.reserve(k);
  for (const SampleSet& s : samples) out.graph.ids.push_back(s.mesh_id);
  out.graph.D = Eigen::MatrixXd::Zero(k, k);

  std::vector<std::pair<int, int>> pair_list;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) pair_list.emplace_back(i, j);
  out.pairs.resize(pair_list.size());

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto [i, j] = pair_list[p];
      DiscreteCpResult r = cp_align(samples[i], samples[j], iters);
      out.pairs[p] = {i, j, std::move(r.map), r.motion};
      out.graph.D(i, j) = out.graph.D(j, i) = r.distance;
    }
  };

  const int workers = std::max(1, jobs);
  if (workers == 1 || pair_list.size() <= 1) {
    run_range(0, pair_list.size());
  } else {
    std::vector<std::thread> threads;
    std::atomic<std::size_t> cursor{0};
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&]() {
        for (;;) {
          const std::size_t p = cursor.fetch_add(1);
          if (p >= pair_list.size()) return;
          run_range(p, p + 1);
        }
      });
    }
    for (auto& t : threads) t.join();
  }
  return out;
}

MstPropagation mst_propagate(const DistanceGraph& g,
                             const std::vector<PairwiseAlignment>& edge_data) {
  const int k = g.size();
  MstPropagation out;
  if (k == 0) throw DisconnectedGraphError("mst_propagate: empty graph");

  // Kruskal with ties broken by the lexicographic id pair.
  struct Edge {
    double w;
    std::string key_a, key_b;
    int a, b;
  };
  std::vector<Edge> edges;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const bool swap = g.ids[j] < g.ids[i];
      edges.push_back({g.D(i, j), g.ids[swap ? j : i], g.ids[swap ? i : j], i, j});
    }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    if (x.w != y.w) return x.w < y.w;
    if (x.key_a != y.key_a) return x.key_a < y.key_a;
    return x.key_b < y.key_b;
  });

  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::vector<int>> adj(k);
  for (const Edge& e : edges) {
    if (find(e.a) == find(e.b)) continue;
    parent[find(e.a)] = find(e.b);
    out.tree_edges.emplace_back(e.a, e.b);
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  if (static_cast<int>(out.tree_edges.size()) != k - 1)
    throw DisconnectedGraphError("mst_propagate: distance graph is disconnected");

  // Root: minimal total distance, ties by smaller id.
  int root = 0;
  double best_sum = g.D.row(0).sum();
  for (int i = 1; i < k; ++i) {
    const double s = g.D.row(i).sum();
    if (s < best_sum || (s == best_sum && g.ids[i] < g.ids[root])) {
      best_sum = s;
      root = i;
    }
  }
  out.root = root;

  auto edge_alignment = [&](int from, int to) -> std::pair<CorrespondenceMap, RigidMotion> {
    for (const PairwiseAlignment& p : edge_data) {
      if (p.from == from && p.to == to) return {p.map, p.motion};
      if (p.from == to && p.to == from) {
        RigidMotion inv = p.motion.inverse();
        return {p.map.inverse(), inv};
      }
    }
    throw MissingMapError("mst_propagate: no alignment for tree edge " + g.ids[from] + " - " +
                          g.ids[to]);
  };

  const int n = edge_data.empty() ? 0 : edge_data.front().map.size();
  out.motion_to_root.assign(k, RigidMotion{});
  out.map_to_root.assign(k, CorrespondenceMap::identity("", "", n));
  out.map_to_root[root] = CorrespondenceMap::identity(g.ids[root], g.ids[root], n);

  // BFS from the root; child's composed alignment = root-ward edge then the
  // parent's composition.
  std::vector<int> order{root};
  std::vector<char> seen(k, 0);
  seen[root] = 1;
  for (std::size_t h = 0; h < order.size(); ++h) {
    const int parent_idx = order[h];
    for (int child : adj[parent_idx]) {
      if (seen[child]) continue;
      seen[child] = 1;
      auto [edge_map, edge_motion] = edge_alignment(child, parent_idx);
      out.motion_to_root[child] = compose(out.motion_to_root[parent_idx], edge_motion);
      out.map_to_root[child] = compose(edge_map, out.map_to_root[parent_idx]);
      out.map_to_root[child].from_id = g.ids[child];
      out.map_to_root[child].to_id = g.ids[root];
      order.push_back(child);
    }
  }
  return out;
}

double landmark_transfer_mse(const std::vector<Vec3>& true_targets,
                             const std::vector<Vec3>& propagated) {
  if (true_targets.size() != propagated.size())
    throw LengthMismatchError("landmark_transfer_mse: length mismatch");
  if (true_targets.empty()) return 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < true_targets.size(); ++i)
    ss += (true_targets[i] - propagated[i]).squaredNorm();
  return ss / double(true_targets.size());
}

}  // namespace shapespace
