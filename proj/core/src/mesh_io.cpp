#include "shapespace/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

namespace shapespace {

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw ParseError(msg); }

void warn(std::vector<std::string>* warnings, const std::string& msg) {
  if (warnings) warnings->push_back(msg);
}

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return line.substr(pos);
  }
  return {};
}

void check_face_indices(const TriMesh& m, const std::vector<int>& poly) {
  for (int idx : poly) {
    if (idx < 0 || idx >= m.vertex_count())
      parse_fail("face index " + std::to_string(idx) + " out of range (" +
                 std::to_string(m.vertex_count()) + " vertices)");
  }
}

void push_polygon(TriMesh& m, const std::vector<int>& poly) {
  check_face_indices(m, poly);
  for (std::size_t k = 2; k < poly.size(); ++k)
    m.faces.push_back({poly[0], poly[k - 1], poly[k]});
}

// ---------------------------------------------------------------- OFF

TriMesh parse_off(std::istream& in) {
  TriMesh m;
  std::string line = next_content_line(in);
  if (line.rfind("OFF", 0) == 0) {
    line = line.substr(3);
    if (line.find_first_not_of(" \t") == std::string::npos) line = next_content_line(in);
  }
  std::istringstream counts(line);
  long nv = -1, nf = -1, ne = 0;
  if (!(counts >> nv >> nf >> ne) || nv < 0 || nf < 0) parse_fail("OFF: bad counts line");
  m.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    std::istringstream ls(next_content_line(in));
    double x, y, z;
    if (!(ls >> x >> y >> z)) parse_fail("OFF: bad vertex line");
    m.vertices.emplace_back(x, y, z);
  }
  for (long i = 0; i < nf; ++i) {
    std::istringstream ls(next_content_line(in));
    int cnt;
    if (!(ls >> cnt) || cnt < 3) parse_fail("OFF: bad face line");
    std::vector<int> poly(cnt);
    for (int& v : poly)
      if (!(ls >> v)) parse_fail("OFF: truncated face line");
    push_polygon(m, poly);
  }
  return m;
}

// ---------------------------------------------------------------- PLY

struct PlyProperty {
  std::string name;
  std::string type;       // scalar type, or the value type for lists
  std::string count_type; // nonempty for lists
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  long count = 0;
  std::vector<PlyProperty> props;
};

int scalar_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
      t == "float32")
    return 4;
  if (t == "double" || t == "float64") return 8;
  parse_fail("PLY: unknown scalar type '" + t + "'");
}

double read_binary_scalar(std::istream& in, const std::string& t) {
  unsigned char buf[8];
  const int n = scalar_size(t);
  if (!in.read(reinterpret_cast<char*>(buf), n)) parse_fail("PLY: truncated binary data");
  // Little-endian payload on a little-endian host.
  auto as = [&buf]<typename T>() {
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return static_cast<double>(v);
  };
  if (t == "char" || t == "int8") return as.operator()<std::int8_t>();
  if (t == "uchar" || t == "uint8") return as.operator()<std::uint8_t>();
  if (t == "short" || t == "int16") return as.operator()<std::int16_t>();
  if (t == "ushort" || t == "uint16") return as.operator()<std::uint16_t>();
  if (t == "int" || t == "int32") return as.operator()<std::int32_t>();
  if (t == "uint" || t == "uint32") return as.operator()<std::uint32_t>();
  if (t == "float" || t == "float32") return as.operator()<float>();
  return as.operator()<double>();
}

TriMesh parse_ply(std::istream& in, std::vector<std::string>* warnings) {
  std::string line;
  if (!std::getline(in, line)) parse_fail("PLY: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") parse_fail("PLY: missing magic");

  bool binary = false;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        parse_fail("PLY: unsupported format '" + fmt + "'");
      }
    } else if (tok == "element") {
      PlyElement e;
      if (!(ls >> e.name >> e.count)) parse_fail("PLY: bad element line");
      elements.push_back(e);
    } else if (tok == "property") {
      if (elements.empty()) parse_fail("PLY: property before element");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        p.is_list = true;
        if (!(ls >> p.count_type >> p.type >> p.name)) parse_fail("PLY: bad list property");
      } else {
        p.type = t;
        if (!(ls >> p.name)) parse_fail("PLY: bad property");
      }
      elements.back().props.push_back(p);
    } else if (tok == "end_header") {
      break;
    } else {
      parse_fail("PLY: unexpected header token '" + tok + "'");
    }
  }

  TriMesh m;
  auto read_ascii_scalar = [&](std::istringstream& ls) {
    double v;
    if (!(ls >> v)) parse_fail("PLY: truncated ascii data");
    return v;
  };

  for (const PlyElement& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    if (!is_vertex && !is_face && e.count > 0)
      warn(warnings, "PLY: ignoring element '" + e.name + "'");

    int ix = -1, iy = -1, iz = -1;
    if (is_vertex) {
      for (std::size_t p = 0; p < e.props.size(); ++p) {
        const std::string& n = e.props[p].name;
        if (n == "x") ix = static_cast<int>(p);
        else if (n == "y") iy = static_cast<int>(p);
        else if (n == "z") iz = static_cast<int>(p);
        else warn(warnings, "PLY: ignoring vertex property '" + n + "'");
      }
      if (ix < 0 || iy < 0 || iz < 0) parse_fail("PLY: vertex element lacks x/y/z");
    }
    const PlyProperty* face_list = nullptr;
    if (is_face) {
      for (const PlyProperty& p : e.props) {
        if (p.is_list && (p.name == "vertex_indices" || p.name == "vertex_index"))
          face_list = &p;
        else if (p.name != "vertex_indices" && p.name != "vertex_index")
          warn(warnings, "PLY: ignoring face property '" + p.name + "'");
      }
      if (!face_list) parse_fail("PLY: face element lacks vertex index list");
    }

    for (long i = 0; i < e.count; ++i) {
      if (!binary) {
        std::istringstream ls(next_content_line(in));
        std::vector<double> vals;
        std::vector<int> poly;
        for (const PlyProperty& p : e.props) {
          if (p.is_list) {
            const int cnt = static_cast<int>(read_ascii_scalar(ls));
            for (int k = 0; k < cnt; ++k) {
              const double v = read_ascii_scalar(ls);
              if (is_face && &p == face_list) poly.push_back(static_cast<int>(v));
            }
          } else {
            vals.push_back(read_ascii_scalar(ls));
          }
        }
        if (is_vertex) m.vertices.emplace_back(vals[ix], vals[iy], vals[iz]);
        if (is_face) push_polygon(m, poly);
      } else {
        std::vector<double> vals;
        std::vector<int> poly;
        int prop_index = 0;
        for (const PlyProperty& p : e.props) {
          if (p.is_list) {
            const int cnt = static_cast<int>(read_binary_scalar(in, p.count_type));
            for (int k = 0; k < cnt; ++k) {
              const double v = read_binary_scalar(in, p.type);
              if (is_face && &p == face_list) poly.push_back(static_cast<int>(v));
            }
          } else {
            vals.push_back(read_binary_scalar(in, p.type));
          }
          ++prop_index;
        }
        (void)prop_index;
        if (is_vertex) m.vertices.emplace_back(vals[ix], vals[iy], vals[iz]);
        if (is_face) push_polygon(m, poly);
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------- OBJ

TriMesh parse_obj(std::istream& in, std::vector<std::string>* warnings) {
  TriMesh m;
  std::string line;
  bool warned_other = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) parse_fail("OBJ: bad vertex line");
      m.vertices.emplace_back(x, y, z);
    } else if (tok == "f") {
      std::vector<int> poly;
      std::string ref;
      while (ls >> ref) {
        const std::string first = ref.substr(0, ref.find('/'));
        long idx = 0;
        try {
          idx = std::stol(first);
        } catch (const std::exception&) {
          parse_fail("OBJ: bad face reference '" + ref + "'");
        }
        if (idx < 0) idx = static_cast<long>(m.vertices.size()) + idx + 1;
        poly.push_back(static_cast<int>(idx - 1));
      }
      if (poly.size() < 3) parse_fail("OBJ: face with fewer than 3 vertices");
      push_polygon(m, poly);
    } else if (tok[0] != '#' && !warned_other) {
      warn(warnings, "OBJ: ignoring records other than v/f");
      warned_other = true;
    }
  }
  return m;
}

// --------------------------------------------------- cleanup / orientation

int drop_repeated_index_faces(TriMesh& m) {
  const auto old_count = m.faces.size();
  std::erase_if(m.faces,
                [](const Face& t) { return t[0] == t[1] || t[1] == t[2] || t[0] == t[2]; });
  return static_cast<int>(old_count - m.faces.size());
}

// Flood-fills a consistent winding over each orientable patch, then flips
// closed components whose signed volume comes out negative so normals point
// outward.
void orient_consistently(TriMesh& m) {
  using EdgeKey = std::pair<int, int>;
  std::map<EdgeKey, std::vector<int>> edge_faces;
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& t = m.faces[f];
    for (int c = 0; c < 3; ++c) {
      int a = t[c], b = t[(c + 1) % 3];
      edge_faces[a < b ? EdgeKey{a, b} : EdgeKey{b, a}].push_back(f);
    }
  }

  auto uses_directed = [&](int f, int a, int b) {
    const Face& t = m.faces[f];
    for (int c = 0; c < 3; ++c)
      if (t[c] == a && t[(c + 1) % 3] == b) return true;
    return false;
  };

  std::vector<int> component(m.face_count(), -1);
  int ncomp = 0;
  for (int seed = 0; seed < m.face_count(); ++seed) {
    if (component[seed] >= 0) continue;
    const int comp = ncomp++;
    std::vector<int> stack{seed};
    component[seed] = comp;
    while (!stack.empty()) {
      const int f = stack.back();
      stack.pop_back();
      const Face t = m.faces[f];
      for (int c = 0; c < 3; ++c) {
        const int a = t[c], b = t[(c + 1) % 3];
        const auto& adj = edge_faces[a < b ? EdgeKey{a, b} : EdgeKey{b, a}];
        if (adj.size() != 2) continue;  // boundary or non-manifold: skip
        const int g = adj[0] == f ? adj[1] : adj[0];
        if (component[g] >= 0) continue;
        // Consistent winding means g must traverse the shared edge as (b, a).
        if (uses_directed(g, a, b)) std::swap(m.faces[g][1], m.faces[g][2]);
        component[g] = comp;
        stack.push_back(g);
      }
    }
  }

  // Outward orientation for closed components.
  std::vector<double> volume(ncomp, 0.0);
  std::vector<char> closed(ncomp, 1);
  for (const auto& [k, adj] : edge_faces)
    if (adj.size() == 1) closed[component[adj[0]]] = 0;
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& t = m.faces[f];
    volume[component[f]] +=
        m.vertices[t[0]].dot(m.vertices[t[1]].cross(m.vertices[t[2]])) / 6.0;
  }
  for (int f = 0; f < m.face_count(); ++f) {
    const int comp = component[f];
    if (closed[comp] && volume[comp] < 0.0) std::swap(m.faces[f][1], m.faces[f][2]);
  }
}

}  // namespace

TriMesh load_mesh(std::istream& in, MeshFormat format, const std::string& id,
                  std::vector<std::string>* warnings) {
  TriMesh m;
  switch (format) {
    case MeshFormat::OFF: m = parse_off(in); break;
    case MeshFormat::PLY: m = parse_ply(in, warnings); break;
    case MeshFormat::OBJ: m = parse_obj(in, warnings); break;
  }
  m.id = id;
  const int dropped = drop_repeated_index_faces(m);
  if (dropped > 0)
    warn(warnings, "dropped " + std::to_string(dropped) + " degenerate faces");
  if (m.faces.empty()) throw EmptyMeshError("load_mesh: no faces");
  orient_consistently(m);
  return m;
}

TriMesh load_mesh_file(const std::string& path, std::vector<std::string>* warnings) {
  auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  MeshFormat fmt;
  if (ext == "off") fmt = MeshFormat::OFF;
  else if (ext == "ply") fmt = MeshFormat::PLY;
  else if (ext == "obj") fmt = MeshFormat::OBJ;
  else throw ParseError("load_mesh_file: unknown extension '" + ext + "'");

  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("load_mesh_file: cannot open " + path);

  auto slash = path.find_last_of("/\\");
  std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
  stem = stem.substr(0, stem.find_last_of('.'));
  return load_mesh(in, fmt, stem, warnings);
}

namespace {

void write_double(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void save_ply(const TriMesh& m, std::ostream& out, const PlyVertexProps& props) {
  const bool with_segment = !props.segment.empty();
  const bool with_dne = !props.aria_dne.empty();
  if (with_segment && static_cast<int>(props.segment.size()) != m.vertex_count())
    throw ShapeMismatchError("save_ply: segment property size mismatch");
  if (with_dne && static_cast<int>(props.aria_dne.size()) != m.vertex_count())
    throw ShapeMismatchError("save_ply: aria_dne property size mismatch");

  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << m.vertex_count() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (with_segment) out << "property int segment\n";
  if (with_dne) out << "property double aria_dne\n";
  out << "element face " << m.face_count() << "\n";
  out << "property list uchar int vertex_indices\n";
  out << "end_header\n";
  for (int i = 0; i < m.vertex_count(); ++i) {
    write_double(out, m.vertices[i].x());
    out << ' ';
    write_double(out, m.vertices[i].y());
    out << ' ';
    write_double(out, m.vertices[i].z());
    if (with_segment) out << ' ' << props.segment[i];
    if (with_dne) {
      out << ' ';
      write_double(out, props.aria_dne[i]);
    }
    out << '\n';
  }
  for (const Face& t : m.faces) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void save_ply_file(const TriMesh& m, const std::string& path, const PlyVertexProps& props) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_ply_file: cannot open " + path);
  save_ply(m, out, props);
}

void save_off(const TriMesh& m, std::ostream& out) {
  out << "OFF\n" << m.vertex_count() << ' ' << m.face_count() << " 0\n";
  for (const Vec3& v : m.vertices) {
    write_double(out, v.x());
    out << ' ';
    write_double(out, v.y());
    out << ' ';
    write_double(out, v.z());
    out << '\n';
  }
  for (const Face& t : m.faces) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace shapespace
