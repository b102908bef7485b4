#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hypwalk {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;
using ArcId = std::int32_t;

struct Edge {
  VertexId tail;
  VertexId head;
  bool operator==(const Edge&) const = default;
};

// Finite, strongly connected directed multigraph. Edge ids are the insertion
// order 0..|E|-1; self-loops and parallel edges are allowed.
class DirectedGraph {
 public:
  DirectedGraph(std::size_t vertex_count, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return n_vertices_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(static_cast<std::size_t>(e)); }
  VertexId tail(EdgeId e) const { return edge(e).tail; }
  VertexId head(EdgeId e) const { return edge(e).head; }

  // Sorted by edge id.
  std::span<const EdgeId> out_edges(VertexId v) const;
  std::span<const EdgeId> in_edges(VertexId v) const;

  // Same ids, tail and head swapped.
  DirectedGraph reversed() const;

  bool operator==(const DirectedGraph& o) const {
    return n_vertices_ == o.n_vertices_ && edges_ == o.edges_;
  }

 private:
  std::size_t n_vertices_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offset_, in_offset_;
  std::vector<EdgeId> out_list_, in_list_;
};

bool is_strongly_connected(std::size_t vertex_count, std::span<const Edge> edges);

struct Arc {
  EdgeId from;
  EdgeId to;
  bool operator==(const Arc&) const = default;
};

// Nodes are the edges of the base graph, arcs the succeeding pairs (e, e')
// with head(e) = tail(e'). Arc ids run over e in id order, then e' in id
// order, so out_arcs(e) is a contiguous block.
class ArcGraph {
 public:
  explicit ArcGraph(const DirectedGraph& g);

  std::size_t node_count() const noexcept { return out_offset_.size() - 1; }
  std::size_t arc_count() const noexcept { return arcs_.size(); }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  const Arc& arc(ArcId k) const { return arcs_.at(static_cast<std::size_t>(k)); }

  ArcId out_begin(EdgeId e) const { return static_cast<ArcId>(out_offset_[static_cast<std::size_t>(e)]); }
  ArcId out_end(EdgeId e) const { return static_cast<ArcId>(out_offset_[static_cast<std::size_t>(e) + 1]); }
  std::span<const ArcId> in_arcs(EdgeId e) const;
  std::optional<ArcId> find(EdgeId from, EdgeId to) const;

 private:
  std::vector<Arc> arcs_;
  std::vector<std::size_t> out_offset_;
  std::vector<std::size_t> in_offset_;
  std::vector<ArcId> in_list_;
};

struct ArcGraphModel {
  DirectedGraph graph;
  ArcGraph arcs;

  explicit ArcGraphModel(DirectedGraph g) : graph(std::move(g)), arcs(graph) {}
  std::size_t edge_count() const noexcept { return graph.edge_count(); }
  std::size_t arc_count() const noexcept { return arcs.arc_count(); }
};

// The reversed model keeps edge ids; arc_map[k] is the id of (e', e) in the
// reversed arc graph for k = (e, e').
struct ReversedModel {
  ArcGraphModel model;
  std::vector<ArcId> arc_map;
};

ReversedModel reverse(const ArcGraphModel& m);

// div(theta)(x) = sum over tail = x minus sum over head = x.
std::vector<double> div_vertex(const DirectedGraph& g, std::span<const double> theta);
// div(Theta)(e) = sum over arcs (e, .) minus sum over arcs (., e).
std::vector<double> div_arc(const ArcGraph& h, std::span<const double> theta);

}  // namespace hypwalk
