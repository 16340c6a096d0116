#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shapespace/mesh.hpp"
#include "shapespace/sampling.hpp"

namespace shapespace {

/// Proper rigid motion x -> R x + t.
struct RigidMotion {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidMotion inverse() const;
};

/// compose(a, b): apply b first, then a.
RigidMotion compose(const RigidMotion& a, const RigidMotion& b);

/// Bijection between equal-size sample sets: assignment[i] is the target
/// index of source sample i.
struct CorrespondenceMap {
  std::string from_id, to_id;
  std::vector<int> assignment;

  int size() const { return static_cast<int>(assignment.size()); }
  CorrespondenceMap inverse() const;
  static CorrespondenceMap identity(const std::string& from, const std::string& to, int n);
};

/// compose(ij, jk): source indices of ij mapped through to jk's targets.
CorrespondenceMap compose(const CorrespondenceMap& ij, const CorrespondenceMap& jk);

/// Symmetric pairwise shape distances over K specimens.
struct DistanceGraph {
  std::vector<std::string> ids;
  Eigen::MatrixXd D;

  int size() const { return static_cast<int>(ids.size()); }
};

struct LandmarkPairs {
  std::vector<Vec3> source;
  std::vector<Vec3> target;
};

struct KabschResult {
  RigidMotion motion;
  double residual = 0.0;   // RMS distance at the optimum
  bool degenerate = false; // rotation not unique (collinear/coincident source)
};

/// Global minimizer of mean squared distance over proper rigid motions.
KabschResult kabsch(const LandmarkPairs& pairs);

/// RMS landmark distance at the Kabsch optimum.
double procrustes_distance(const LandmarkPairs& pairs);

/// The four proper axis-matching rotations between the principal frames of
/// two point clouds (uniform weights), each with the centroid-matching
/// translation.
std::array<RigidMotion, 4> pca_candidates(const std::vector<Vec3>& a,
                                          const std::vector<Vec3>& b);

struct PcaAlignResult {
  RigidMotion motion;
  double score = 0.0;
  bool ambiguous = false;  // near-equal principal values
};

/// Aligns mesh a to mesh b by principal axes (area-weighted covariance),
/// evaluating all four proper sign assignments and keeping the one with the
/// lowest sampled Procrustes score.
PcaAlignResult pca_align(const TriMesh& a, const TriMesh& b);

struct DiscreteCpResult {
  CorrespondenceMap map;
  RigidMotion motion;
  double distance = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;  // mean squared distance after every half-step
};

/// Alternating exact linear assignment / Kabsch refit from a rigid initial
/// guess. The objective is non-increasing; iteration stops when the
/// assignment is stationary or `iters` is reached (converged = false).
DiscreteCpResult discrete_cp(const SampleSet& a, const SampleSet& b,
                             const RigidMotion& init, int iters);

/// Best discrete_cp result over several initial motions (first wins ties).
DiscreteCpResult discrete_cp_multistart(const SampleSet& a, const SampleSet& b,
                                        const std::vector<RigidMotion>& inits, int iters);

/// discrete_cp restarted from the four PCA candidates of the sample clouds.
DiscreteCpResult cp_align(const SampleSet& a, const SampleSet& b, int iters = 60);

struct PairwiseAlignment {
  int from = 0, to = 0;  // indices into the id list
  CorrespondenceMap map;
  RigidMotion motion;
};

struct PairwiseResult {
  DistanceGraph graph;
  std::vector<PairwiseAlignment> pairs;  // one per unordered pair, from < to

  const PairwiseAlignment* find(int from, int to) const;  // nullptr if absent
};

/// All-pairs discrete cP distances and maps; jobs > 1 runs pairs on a
/// bounded worker pool (results are placed by index, so the output is
/// independent of completion order).
PairwiseResult cp_distance_graph(const std::vector<SampleSet>& samples, int iters = 60,
                                 int jobs = 1);

struct MstPropagation {
  int root = 0;
  std::vector<std::pair<int, int>> tree_edges;       // (a, b) with a < b
  std::vector<RigidMotion> motion_to_root;           // per specimen
  std::vector<CorrespondenceMap> map_to_root;        // per specimen
};

/// Deterministic Kruskal MST (ties by lexicographic id pair), root = minimal
/// total distance to the others, alignments composed along tree paths.
MstPropagation mst_propagate(const DistanceGraph& g,
                             const std::vector<PairwiseAlignment>& edge_data);

/// Mean squared Euclidean distance between two equally long point lists.
double landmark_transfer_mse(const std::vector<Vec3>& true_targets,
                             const std::vector<Vec3>& propagated);

/// Exact minimum-cost linear assignment (square cost matrix); returns the
/// column assigned to each row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace shapespace
