#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hypwalk/graph.hpp"

namespace hypwalk {

// Direction k < d is +e_k, direction k >= d is -e_{k-d}.
inline int opposite_direction(int dir, int d) { return dir < d ? dir + d : dir - d; }

struct TorusSpec {
  int d = 3;
  int n = 4;
  int root_direction = 0;  // e0 = (-e_r, 0)
};

struct BoxGraphSpec {
  int d = 3;
  int radius = 4;
  int root_direction = 0;  // x0 = -e_r, e0 = (x0, 0)
};

enum class LatticeKind { torus, box };

// Torus: vertices are coordinate vectors in {0..N-1}^d in lexicographic order
// (first coordinate most significant), origin has index 0, and edge id is
// vertex_index * 2d + direction.
//
// Box: vertices of [-N, N]^d in lexicographic order, then the boundary vertex
// (last index). Edge (x, dir) for every box vertex and direction has id
// vertex_index * 2d + dir; steps leaving the box go to the boundary vertex.
// The special edge (boundary, x0) is the last edge.
class LatticeGraph {
 public:
  static LatticeGraph torus(const TorusSpec& spec);
  static LatticeGraph box(const BoxGraphSpec& spec);

  const ArcGraphModel& model() const noexcept { return model_; }
  const DirectedGraph& graph() const noexcept { return model_.graph; }
  const ArcGraph& arcs() const noexcept { return model_.arcs; }
  LatticeKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return d_; }
  int size() const noexcept { return n_; }  // torus side or box radius

  VertexId origin() const noexcept { return origin_; }
  EdgeId root_edge() const noexcept { return root_edge_; }
  int root_direction() const noexcept { return root_dir_; }
  std::optional<VertexId> boundary_vertex() const noexcept { return boundary_; }
  std::optional<EdgeId> special_edge() const noexcept { return special_; }

  // Lattice direction of an edge; -1 for the special edge.
  int direction(EdgeId e) const { return dir_.at(static_cast<std::size_t>(e)); }
  EdgeId edge_from(VertexId x, int dir) const;
  // Edge (head e, tail e) when it exists in the same graph.
  std::optional<EdgeId> opposite(EdgeId e) const;
  std::vector<int> coords(VertexId x) const;
  std::optional<VertexId> vertex_at(std::span<const int> c) const;
  std::size_t lattice_vertex_count() const noexcept { return n_lattice_; }

 private:
  LatticeGraph(ArcGraphModel m, LatticeKind kind, int d, int n);

  ArcGraphModel model_;
  LatticeKind kind_;
  int d_, n_;
  int root_dir_ = 0;
  std::size_t n_lattice_ = 0;
  VertexId origin_ = 0;
  EdgeId root_edge_ = 0;
  std::optional<VertexId> boundary_;
  std::optional<EdgeId> special_;
  std::vector<int> dir_;
};

}  // namespace hypwalk
