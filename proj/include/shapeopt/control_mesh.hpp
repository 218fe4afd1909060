#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "shapeopt/errors.hpp"

namespace shapeopt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat = Eigen::MatrixXd;  // vertices: one row per vertex

enum class MeshKind { closed_curve, open_curve, quad_mesh };

/// Per-vertex coordinate freeze mask, bit i freezes coordinate i.
using FreezeMask = std::uint8_t;
inline constexpr FreezeMask freeze_none = 0;
inline FreezeMask freeze_all(int dim) {
  return static_cast<FreezeMask>((1u << dim) - 1u);
}

using Edge = std::pair<int, int>;  // stored as (min, max)

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Control mesh of a subdivision curve (dim 2 or 3) or a Catmull-Clark quad
/// mesh. Vertices are kept in refinement id order: after one subdivision the
/// ids are [coarse vertex points | edge points | face points]. Curves carry an
/// explicit traversal cycle because the id order and the polygon order differ
/// after refinement.
struct ControlMesh {
  int dim = 2;
  Mat vertices;  // n x dim
  MeshKind kind = MeshKind::closed_curve;
  std::vector<int> cycle;                  // curves: vertex ids in path order
  std::vector<std::array<int, 4>> faces;   // quad meshes
  int level = 0;

  std::vector<char> corner;              // per vertex
  std::vector<FreezeMask> frozen;        // per vertex
  std::set<Edge> creases;                // quad meshes only

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  bool is_curve() const { return kind != MeshKind::quad_mesh; }
  bool closed() const { return kind != MeshKind::open_curve; }

  void init_tags() {
    corner.assign(vertex_count(), 0);
    frozen.assign(vertex_count(), freeze_none);
  }

  Eigen::RowVectorXd vertex(int i) const { return vertices.row(i); }
};

inline ControlMesh make_closed_curve(const Mat& pts) {
  ControlMesh m;
  m.dim = static_cast<int>(pts.cols());
  m.vertices = pts;
  m.kind = MeshKind::closed_curve;
  m.cycle.resize(pts.rows());
  for (int i = 0; i < pts.rows(); ++i) m.cycle[i] = i;
  m.init_tags();
  return m;
}

inline ControlMesh make_open_curve(const Mat& pts) {
  ControlMesh m = make_closed_curve(pts);
  m.kind = MeshKind::open_curve;
  return m;
}

inline ControlMesh make_quad_mesh(const Mat& pts,
                                  std::vector<std::array<int, 4>> faces) {
  ControlMesh m;
  m.dim = static_cast<int>(pts.cols());
  m.vertices = pts;
  m.kind = MeshKind::quad_mesh;
  m.faces = std::move(faces);
  m.init_tags();
  return m;
}

/// Sorted unique edge list of a quad mesh, lexicographic (min,max) order.
/// This is the canonical edge numbering used by refinement.
inline std::vector<Edge> quad_edges(const ControlMesh& m) {
  std::set<Edge> s;
  for (const auto& f : m.faces)
    for (int k = 0; k < 4; ++k) s.insert(make_edge(f[k], f[(k + 1) % 4]));
  return {s.begin(), s.end()};
}

/// Curve edges in traversal order: (cycle[i], cycle[i+1]).
inline std::vector<Edge> curve_edges(const ControlMesh& m) {
  std::vector<Edge> e;
  const int n = static_cast<int>(m.cycle.size());
  const int ne = m.closed() ? n : n - 1;
  e.reserve(ne);
  for (int i = 0; i < ne; ++i)
    e.push_back({m.cycle[i], m.cycle[(i + 1) % n]});  // keeps orientation
  return e;
}

struct QuadAdjacency {
  std::vector<Edge> edges;
  std::map<Edge, int> edge_index;
  std::vector<std::vector<int>> edge_faces;      // per edge
  std::vector<std::vector<int>> vertex_faces;    // per vertex
  std::vector<std::vector<int>> vertex_edges;    // per vertex (edge ids)
};

inline QuadAdjacency build_adjacency(const ControlMesh& m) {
  QuadAdjacency a;
  a.edges = quad_edges(m);
  for (int e = 0; e < static_cast<int>(a.edges.size()); ++e)
    a.edge_index[a.edges[e]] = e;
  a.edge_faces.resize(a.edges.size());
  a.vertex_faces.resize(m.vertex_count());
  a.vertex_edges.resize(m.vertex_count());
  for (int f = 0; f < static_cast<int>(m.faces.size()); ++f) {
    const auto& q = m.faces[f];
    for (int k = 0; k < 4; ++k) {
      a.vertex_faces[q[k]].push_back(f);
      const int e = a.edge_index.at(make_edge(q[k], q[(k + 1) % 4]));
      a.edge_faces[e].push_back(f);
    }
  }
  for (int e = 0; e < static_cast<int>(a.edges.size()); ++e) {
    a.vertex_edges[a.edges[e].first].push_back(e);
    a.vertex_edges[a.edges[e].second].push_back(e);
  }
  return a;
}

/// Validates the ControlMesh invariants. Throws on violation.
inline void validate(const ControlMesh& m) {
  if (m.dim != 2 && m.dim != 3) throw StructuralError("dim must be 2 or 3");
  if (m.is_curve()) {
    if (static_cast<int>(m.cycle.size()) != m.vertex_count())
      throw StructuralError("curve cycle must list every vertex once");
    if (m.vertex_count() < 4)
      throw SizeError("curve needs >= 4 vertices for the cubic scheme");
    std::vector<char> seen(m.vertex_count(), 0);
    for (int v : m.cycle) {
      if (v < 0 || v >= m.vertex_count() || seen[v])
        throw StructuralError("curve cycle is not a permutation of vertices");
      seen[v] = 1;
    }
    return;
  }
  if (m.faces.empty()) throw TopologyError("quad mesh has no faces");
  for (const auto& f : m.faces) {
    std::set<int> uniq(f.begin(), f.end());
    if (uniq.size() != 4)
      throw TopologyError("face with repeated vertices");
    for (int v : f)
      if (v < 0 || v >= m.vertex_count())
        throw TopologyError("face references missing vertex");
  }
  // Manifoldness and orientation: each edge in at most two faces, and shared
  // edges traversed in opposite directions.
  std::map<Edge, std::vector<std::pair<int, int>>> dir;  // edge -> (from,to)
  for (const auto& f : m.faces)
    for (int k = 0; k < 4; ++k)
      dir[make_edge(f[k], f[(k + 1) % 4])].push_back({f[k], f[(k + 1) % 4]});
  for (const auto& [e, uses] : dir) {
    if (uses.size() > 2)
      throw TopologyError("non-manifold edge (" + std::to_string(e.first) +
                          "," + std::to_string(e.second) + ")");
    if (uses.size() == 2 && uses[0] == uses[1])
      throw TopologyError("inconsistent face orientation across edge (" +
                          std::to_string(e.first) + "," +
                          std::to_string(e.second) + ")");
  }
}

/// Applies an affine map x -> A x + b to every vertex (testing helper).
inline ControlMesh transformed(const ControlMesh& m, const Mat& A,
                               const Eigen::VectorXd& b) {
  ControlMesh r = m;
  r.vertices = (m.vertices * A.transpose()).rowwise() + b.transpose();
  return r;
}

}  // namespace shapeopt
