#pragma once

#include <Eigen/Sparse>
#include <map>
#include <numeric>
#include <vector>

#include "shapeopt/control_mesh.hpp"

namespace shapeopt {

/// Linear refinement operator: fine vertices = S * coarse vertices, applied
/// per coordinate column. Rows sum to one (affine invariance).
struct SubdivisionOperator {
  Eigen::SparseMatrix<double> S;  // fine_count x coarse_count
  int coarse_count = 0;
  int fine_count = 0;

  Mat apply(const Mat& coarse) const { return S * coarse; }
};

namespace detail {

// Vertex classification for the Catmull-Clark rules. Boundary edges behave
// as creases; a corner tag or three and more incident creases interpolate.
struct QuadVertexClass {
  enum Kind { smooth, crease, interpolate } kind = smooth;
  int crease_a = -1, crease_b = -1;  // crease neighbours when kind == crease
};

inline bool edge_is_crease(const ControlMesh& m, const QuadAdjacency& adj,
                           int edge_id) {
  const Edge e = adj.edges[edge_id];
  return adj.edge_faces[edge_id].size() == 1 || m.creases.count(e) > 0;
}

inline std::vector<QuadVertexClass> classify_quad_vertices(
    const ControlMesh& m, const QuadAdjacency& adj) {
  std::vector<QuadVertexClass> cls(m.vertex_count());
  for (int v = 0; v < m.vertex_count(); ++v) {
    std::vector<int> crease_nbrs;
    for (int e : adj.vertex_edges[v])
      if (edge_is_crease(m, adj, e)) {
        const Edge& ed = adj.edges[e];
        crease_nbrs.push_back(ed.first == v ? ed.second : ed.first);
      }
    if (m.corner[v] || crease_nbrs.size() >= 3) {
      cls[v].kind = QuadVertexClass::interpolate;
    } else if (crease_nbrs.size() == 2) {
      cls[v].kind = QuadVertexClass::crease;
      cls[v].crease_a = crease_nbrs[0];
      cls[v].crease_b = crease_nbrs[1];
    }
  }
  return cls;
}

// Refined mesh with topology, tags and level set up; coordinates zeroed.
// Returns the canonical coarse edge list alongside.
inline ControlMesh refined_curve_shell(const ControlMesh& m) {
  const int n = m.vertex_count();
  const int ne = m.closed() ? n : n - 1;
  ControlMesh f;
  f.dim = m.dim;
  f.kind = m.kind;
  f.level = m.level + 1;
  f.vertices = Mat::Zero(n + ne, m.dim);
  f.cycle.clear();
  for (int k = 0; k < n; ++k) {
    f.cycle.push_back(m.cycle[k]);
    if (k < ne) f.cycle.push_back(n + k);
  }
  f.init_tags();
  for (int v = 0; v < n; ++v) {
    f.corner[v] = m.corner[v];
    f.frozen[v] = m.frozen[v];
  }
  for (int k = 0; k < ne; ++k) {
    const int a = m.cycle[k], b = m.cycle[(k + 1) % n];
    f.frozen[n + k] = static_cast<FreezeMask>(m.frozen[a] & m.frozen[b]);
  }
  return f;
}

inline ControlMesh refined_quad_shell(const ControlMesh& m,
                                      const QuadAdjacency& adj) {
  const int nv = m.vertex_count();
  const int ne = static_cast<int>(adj.edges.size());
  const int nf = static_cast<int>(m.faces.size());
  ControlMesh f;
  f.dim = m.dim;
  f.kind = MeshKind::quad_mesh;
  f.level = m.level + 1;
  f.vertices = Mat::Zero(nv + ne + nf, m.dim);
  f.faces.reserve(4 * nf);
  auto eid = [&](int a, int b) { return nv + adj.edge_index.at(make_edge(a, b)); };
  for (int q = 0; q < nf; ++q) {
    const auto& fa = m.faces[q];
    const int c = nv + ne + q;
    for (int k = 0; k < 4; ++k) {
      const int a = fa[k], b = fa[(k + 1) % 4], d = fa[(k + 3) % 4];
      f.faces.push_back({a, eid(a, b), c, eid(d, a)});
    }
  }
  f.init_tags();
  for (int v = 0; v < nv; ++v) {
    f.corner[v] = m.corner[v];
    f.frozen[v] = m.frozen[v];
  }
  for (int e = 0; e < ne; ++e) {
    const auto [a, b] = adj.edges[e];
    f.frozen[nv + e] = static_cast<FreezeMask>(m.frozen[a] & m.frozen[b]);
    if (m.creases.count(adj.edges[e])) {
      f.creases.insert(make_edge(a, nv + e));
      f.creases.insert(make_edge(nv + e, b));
    }
  }
  for (int q = 0; q < nf; ++q) {
    FreezeMask fm = freeze_all(m.dim);
    for (int v : m.faces[q]) fm &= m.frozen[v];
    f.frozen[nv + ne + q] = fm;
  }
  return f;
}

// Stencil of one fine vertex as (coarse id, weight) pairs. Shared by the
// direct and matrix paths below only through the shell topology; the weight
// arithmetic is kept separate per path on purpose (cross-checked in tests).
template <class Emit>
inline void curve_stencils(const ControlMesh& m, Emit&& emit) {
  const int n = m.vertex_count();
  const int ne = m.closed() ? n : n - 1;
  std::vector<int> pos(n);  // vertex id -> cycle position
  for (int k = 0; k < n; ++k) pos[m.cycle[k]] = k;
  for (int v = 0; v < n; ++v) {
    const int k = pos[v];
    const bool endpoint = !m.closed() && (k == 0 || k == n - 1);
    if (m.corner[v] || endpoint) {
      emit(v, v, 1.0);
      continue;
    }
    const int prev = m.cycle[(k - 1 + n) % n];
    const int next = m.cycle[(k + 1) % n];
    emit(v, prev, 1.0 / 8.0);
    emit(v, v, 3.0 / 4.0);
    emit(v, next, 1.0 / 8.0);
  }
  for (int k = 0; k < ne; ++k) {
    const int a = m.cycle[k], b = m.cycle[(k + 1) % n];
    emit(n + k, a, 0.5);
    emit(n + k, b, 0.5);
  }
}

template <class Emit>
inline void quad_stencils(const ControlMesh& m, const QuadAdjacency& adj,
                          Emit&& emit) {
  const int nv = m.vertex_count();
  const int ne = static_cast<int>(adj.edges.size());
  const auto cls = classify_quad_vertices(m, adj);

  for (int v = 0; v < nv; ++v) {
    switch (cls[v].kind) {
      case QuadVertexClass::interpolate:
        emit(v, v, 1.0);
        break;
      case QuadVertexClass::crease:
        emit(v, cls[v].crease_a, 1.0 / 8.0);
        emit(v, v, 3.0 / 4.0);
        emit(v, cls[v].crease_b, 1.0 / 8.0);
        break;
      case QuadVertexClass::smooth: {
        const auto& faces = adj.vertex_faces[v];
        const int val = static_cast<int>(faces.size());
        const double beta = 3.0 / (2.0 * val);
        const double gamma = 1.0 / (4.0 * val);
        emit(v, v, 1.0 - beta - gamma);
        for (int e : adj.vertex_edges[v]) {
          const Edge& ed = adj.edges[e];
          emit(v, ed.first == v ? ed.second : ed.first, beta / val);
        }
        for (int q : faces) {
          const auto& fa = m.faces[q];
          int i = 0;
          while (fa[i] != v) ++i;
          emit(v, fa[(i + 2) % 4], gamma / val);  // diagonal vertex
        }
        break;
      }
    }
  }

  for (int e = 0; e < ne; ++e) {
    const auto [a, b] = adj.edges[e];
    if (edge_is_crease(m, adj, e)) {
      emit(nv + e, a, 0.5);
      emit(nv + e, b, 0.5);
      continue;
    }
    emit(nv + e, a, 3.0 / 8.0);
    emit(nv + e, b, 3.0 / 8.0);
    for (int q : adj.edge_faces[e])
      for (int w : m.faces[q])
        if (w != a && w != b) emit(nv + e, w, 1.0 / 16.0);
  }

  for (int q = 0; q < static_cast<int>(m.faces.size()); ++q)
    for (int v : m.faces[q]) emit(nv + ne + q, v, 0.25);
}

}  // namespace detail

/// One step of subdivision refinement: cubic b-spline rules on curves,
/// Catmull-Clark on quad meshes. Crease edges and their vertices follow the
/// 1D rules; corner vertices interpolate.
inline ControlMesh subdivide(const ControlMesh& m) {
  validate(m);
  if (m.is_curve()) {
    ControlMesh f = detail::refined_curve_shell(m);
    detail::curve_stencils(m, [&](int row, int col, double w) {
      f.vertices.row(row) += w * m.vertices.row(col);
    });
    return f;
  }
  const QuadAdjacency adj = build_adjacency(m);
  ControlMesh f = detail::refined_quad_shell(m, adj);
  detail::quad_stencils(m, adj, [&](int row, int col, double w) {
    f.vertices.row(row) += w * m.vertices.row(col);
  });
  return f;
}

/// Sparse matrix S with subdivide(m).vertices == S * m.vertices.
inline SubdivisionOperator build_subdivision_operator(const ControlMesh& m) {
  validate(m);
  std::vector<Eigen::Triplet<double>> trip;
  int fine_count = 0;
  if (m.is_curve()) {
    fine_count = m.vertex_count() + (m.closed() ? m.vertex_count()
                                                : m.vertex_count() - 1);
    detail::curve_stencils(m, [&](int row, int col, double w) {
      trip.emplace_back(row, col, w);
    });
  } else {
    const QuadAdjacency adj = build_adjacency(m);
    fine_count = m.vertex_count() + static_cast<int>(adj.edges.size()) +
                 static_cast<int>(m.faces.size());
    detail::quad_stencils(m, adj, [&](int row, int col, double w) {
      trip.emplace_back(row, col, w);
    });
  }
  SubdivisionOperator op;
  op.coarse_count = m.vertex_count();
  op.fine_count = fine_count;
  op.S.resize(fine_count, m.vertex_count());
  op.S.setFromTriplets(trip.begin(), trip.end());
  op.S.makeCompressed();
  return op;
}

/// Result of reversing one refinement step: the coarse connectivity (with
/// zeroed coordinates) and the fine vertex id corresponding to each row of
/// the coarse mesh's subdivision operator.
struct CoarseShell {
  ControlMesh mesh;
  std::vector<int> fine_of_row;
};

/// Reconstructs the level-(l-1) connectivity of a mesh produced by pure
/// refinement. Curves take the even cycle positions as vertex points; quad
/// meshes require the四-group face structure written by subdivide().
inline CoarseShell coarse_topology_of(const ControlMesh& fine) {
  CoarseShell out;
  ControlMesh& c = out.mesh;
  c.dim = fine.dim;
  c.level = fine.level - 1;
  if (fine.is_curve()) {
    const int nf = fine.vertex_count();
    const int n = fine.closed() ? nf / 2 : (nf + 1) / 2;
    if ((fine.closed() && nf % 2 != 0) || n < 4)
      throw StructuralError("curve is not a refinement of a valid mesh");
    c.kind = fine.kind;
    c.vertices = Mat::Zero(n, fine.dim);
    c.cycle.resize(n);
    std::iota(c.cycle.begin(), c.cycle.end(), 0);
    c.init_tags();
    out.fine_of_row.resize(fine.vertex_count());
    for (int k = 0; k < n; ++k) {
      const int vp = fine.cycle[2 * k];
      out.fine_of_row[k] = vp;
      c.corner[k] = fine.corner[vp];
      c.frozen[k] = fine.frozen[vp];
      if (2 * k + 1 < nf) out.fine_of_row[n + k] = fine.cycle[2 * k + 1];
    }
    return out;
  }
  if (fine.faces.size() % 4 != 0)
    throw StructuralError("quad mesh face count is not a multiple of 4");
  const int nf = static_cast<int>(fine.faces.size()) / 4;
  c.kind = MeshKind::quad_mesh;
  c.faces.resize(nf);
  int nv = 0;
  for (int q = 0; q < nf; ++q) {
    const int center = fine.faces[4 * q][2];
    for (int j = 0; j < 4; ++j) {
      if (fine.faces[4 * q + j][2] != center)
        throw StructuralError("fine faces lack the refinement face-point");
      c.faces[q][j] = fine.faces[4 * q + j][0];
      nv = std::max(nv, c.faces[q][j] + 1);
    }
  }
  c.vertices = Mat::Zero(nv, fine.dim);
  c.init_tags();
  const QuadAdjacency adj = build_adjacency(c);
  const int ne = static_cast<int>(adj.edges.size());
  if (nv + ne + nf != fine.vertex_count())
    throw StructuralError("fine vertex count inconsistent with refinement");
  out.fine_of_row.assign(nv + ne + nf, -1);
  for (int v = 0; v < nv; ++v) {
    out.fine_of_row[v] = v;
    c.corner[v] = fine.corner[v];
    c.frozen[v] = fine.frozen[v];
  }
  for (int q = 0; q < nf; ++q) {
    out.fine_of_row[nv + ne + q] = fine.faces[4 * q][2];
    for (int j = 0; j < 4; ++j) {
      const int a = c.faces[q][j], b = c.faces[q][(j + 1) % 4];
      const int mid = fine.faces[4 * q + j][1];
      const int row = nv + adj.edge_index.at(make_edge(a, b));
      if (out.fine_of_row[row] != -1 && out.fine_of_row[row] != mid)
        throw StructuralError("fine faces disagree on edge-point ids");
      out.fine_of_row[row] = mid;
      if (fine.creases.count(make_edge(a, mid)) &&
          fine.creases.count(make_edge(mid, b)))
        c.creases.insert(make_edge(a, b));
    }
  }
  for (int r : out.fine_of_row)
    if (r < 0) throw StructuralError("unmatched refinement vertex");
  return out;
}

}  // namespace shapeopt
