#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "shapespace/errors.hpp"

namespace shapespace {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

/// Indexed triangle surface. Vertices are positions in the specimen's
/// original units until normalize_mesh() is applied.
struct TriMesh {
  std::string id;
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }
};

struct DiagnosticsReport {
  std::int64_t degenerate_face_count = 0;
  std::int64_t duplicate_vertex_count = 0;
  std::int64_t boundary_loop_count = 0;
  std::int64_t non_manifold_edge_count = 0;
  std::int64_t connected_component_count = 0;
};

enum class MeshFormat { OFF, PLY, OBJ };

// Per-face and aggregate geometry.
double face_area(const TriMesh& m, int f);
Vec3 face_normal(const TriMesh& m, int f);  // unit; zero vector on degenerate faces
double surface_area(const TriMesh& m);
Vec3 area_centroid(const TriMesh& m);
double bbox_diagonal(const TriMesh& m);

/// Parse a mesh from a byte stream. Faces with a repeated vertex index are
/// dropped; the rest are re-oriented consistently where orientability
/// permits (outward for closed components). Ignored file content is
/// reported through `warnings` when given. Throws ParseError / EmptyMeshError.
TriMesh load_mesh(std::istream& in, MeshFormat format, const std::string& id = "",
                  std::vector<std::string>* warnings = nullptr);
TriMesh load_mesh_file(const std::string& path,
                       std::vector<std::string>* warnings = nullptr);

/// Optional per-vertex attributes carried into the PLY output.
struct PlyVertexProps {
  std::vector<int> segment;        // property int segment
  std::vector<double> aria_dne;    // property double aria_dne
};

void save_ply(const TriMesh& m, std::ostream& out, const PlyVertexProps& props = {});
void save_ply_file(const TriMesh& m, const std::string& path, const PlyVertexProps& props = {});
void save_off(const TriMesh& m, std::ostream& out);

/// Uniform rescale + translation: area-weighted centroid at the origin,
/// total area 1.
TriMesh normalize_mesh(const TriMesh& m);

/// Counts of mesh defects; pure function, no repair.
DiagnosticsReport validate_mesh(const TriMesh& m);

/// Angle-weighted average of incident face normals, unit length.
/// Throws IsolatedVertexError if some vertex has no incident face.
std::vector<Vec3> vertex_normals(const TriMesh& m);

std::string diagnostics_to_json(const DiagnosticsReport& r);

}  // namespace shapespace
