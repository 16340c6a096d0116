#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapespace/mesh.hpp"

namespace shapespace {

/// N well-distributed surface points. Sampling picks mesh vertices, so the
/// barycentric source of each point is a face corner.
struct SampleSet {
  std::string mesh_id;
  std::uint64_t seed = 0;
  std::vector<Vec3> points;
  std::vector<int> vertex_indices;
  std::vector<int> source_faces;
  std::vector<Vec3> barycentric;

  int size() const { return static_cast<int>(points.size()); }
  Vec3 evaluate_source(const TriMesh& m, int i) const;
};

/// Shortest-path distances on the edge graph with Euclidean weights from
/// `source` to every vertex (inf for unreachable ones).
std::vector<double> graph_geodesics(const TriMesh& m, int source);

/// Farthest point sampling on the edge-graph metric. The start vertex of
/// each connected component is chosen by the seed; every further point
/// maximizes distance to the already chosen set, ties broken by lowest
/// vertex index. Components receive samples proportionally to their area,
/// largest first.
SampleSet farthest_point_sample(const TriMesh& m, int n, std::uint64_t seed);

}  // namespace shapespace
