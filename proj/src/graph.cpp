#include "hypwalk/graph.hpp"

#include <algorithm>
#include <string>

#include "hypwalk/error.hpp"

namespace hypwalk {

namespace {

void build_csr(std::size_t n, const std::vector<Edge>& edges, bool by_tail,
               std::vector<std::size_t>& offset, std::vector<EdgeId>& list) {
  offset.assign(n + 1, 0);
  for (const auto& e : edges) ++offset[static_cast<std::size_t>(by_tail ? e.tail : e.head) + 1];
  for (std::size_t v = 0; v < n; ++v) offset[v + 1] += offset[v];
  list.resize(edges.size());
  std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto v = static_cast<std::size_t>(by_tail ? edges[i].tail : edges[i].head);
    list[fill[v]++] = static_cast<EdgeId>(i);
  }
}

std::vector<char> reach(std::size_t n, const std::vector<std::size_t>& offset,
                        const std::vector<EdgeId>& list, std::span<const Edge> edges,
                        bool forward) {
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto i = offset[v]; i < offset[v + 1]; ++i) {
      const auto& e = edges[static_cast<std::size_t>(list[i])];
      auto w = static_cast<std::size_t>(forward ? e.head : e.tail);
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_strongly_connected(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) return false;
  std::vector<Edge> copy(edges.begin(), edges.end());
  std::vector<std::size_t> oo, io;
  std::vector<EdgeId> ol, il;
  build_csr(n, copy, true, oo, ol);
  build_csr(n, copy, false, io, il);
  auto f = reach(n, oo, ol, edges, true);
  auto b = reach(n, io, il, edges, false);
  return std::all_of(f.begin(), f.end(), [](char c) { return c; }) &&
         std::all_of(b.begin(), b.end(), [](char c) { return c; });
}

DirectedGraph::DirectedGraph(std::size_t vertex_count, std::vector<Edge> edges)
    : n_vertices_(vertex_count), edges_(std::move(edges)) {
  require(n_vertices_ > 0, "graph must have at least one vertex");
  for (const auto& e : edges_) {
    if (e.tail < 0 || e.head < 0 || static_cast<std::size_t>(e.tail) >= n_vertices_ ||
        static_cast<std::size_t>(e.head) >= n_vertices_)
      throw PreconditionError("edge endpoint out of range");
  }
  build_csr(n_vertices_, edges_, true, out_offset_, out_list_);
  build_csr(n_vertices_, edges_, false, in_offset_, in_list_);
  for (std::size_t v = 0; v < n_vertices_; ++v) {
    if (out_offset_[v] == out_offset_[v + 1])
      throw PreconditionError("vertex " + std::to_string(v) + " is a sink (out-degree 0)");
    if (in_offset_[v] == in_offset_[v + 1])
      throw PreconditionError("vertex " + std::to_string(v) + " is a source (in-degree 0)");
  }
  auto f = reach(n_vertices_, out_offset_, out_list_, edges_, true);
  auto b = reach(n_vertices_, in_offset_, in_list_, edges_, false);
  for (std::size_t v = 0; v < n_vertices_; ++v)
    if (!f[v] || !b[v]) throw PreconditionError("graph is not strongly connected");
}

std::span<const EdgeId> DirectedGraph::out_edges(VertexId v) const {
  auto i = static_cast<std::size_t>(v);
  return {out_list_.data() + out_offset_.at(i), out_offset_.at(i + 1) - out_offset_[i]};
}

std::span<const EdgeId> DirectedGraph::in_edges(VertexId v) const {
  auto i = static_cast<std::size_t>(v);
  return {in_list_.data() + in_offset_.at(i), in_offset_.at(i + 1) - in_offset_[i]};
}

DirectedGraph DirectedGraph::reversed() const {
  std::vector<Edge> r;
  r.reserve(edges_.size());
  for (const auto& e : edges_) r.push_back({e.head, e.tail});
  return DirectedGraph(n_vertices_, std::move(r));
}

ArcGraph::ArcGraph(const DirectedGraph& g) {
  const auto m = g.edge_count();
  out_offset_.assign(m + 1, 0);
  for (std::size_t e = 0; e < m; ++e) {
    auto succ = g.out_edges(g.head(static_cast<EdgeId>(e)));
    if (succ.empty()) throw PreconditionError("edge without successor");
    out_offset_[e + 1] = out_offset_[e] + succ.size();
    for (auto f : succ) arcs_.push_back({static_cast<EdgeId>(e), f});
  }
  in_offset_.assign(m + 1, 0);
  for (const auto& a : arcs_) ++in_offset_[static_cast<std::size_t>(a.to) + 1];
  for (std::size_t e = 0; e < m; ++e) in_offset_[e + 1] += in_offset_[e];
  in_list_.resize(arcs_.size());
  std::vector<std::size_t> fill(in_offset_.begin(), in_offset_.end() - 1);
  for (std::size_t k = 0; k < arcs_.size(); ++k)
    in_list_[fill[static_cast<std::size_t>(arcs_[k].to)]++] = static_cast<ArcId>(k);
}

std::span<const ArcId> ArcGraph::in_arcs(EdgeId e) const {
  auto i = static_cast<std::size_t>(e);
  return {in_list_.data() + in_offset_.at(i), in_offset_.at(i + 1) - in_offset_[i]};
}

std::optional<ArcId> ArcGraph::find(EdgeId from, EdgeId to) const {
  if (from < 0 || static_cast<std::size_t>(from) >= node_count()) return std::nullopt;
  auto first = arcs_.begin() + out_begin(from);
  auto last = arcs_.begin() + out_end(from);
  auto it = std::lower_bound(first, last, to, [](const Arc& a, EdgeId t) { return a.to < t; });
  if (it == last || it->to != to) return std::nullopt;
  return static_cast<ArcId>(it - arcs_.begin());
}

ReversedModel reverse(const ArcGraphModel& m) {
  ReversedModel r{ArcGraphModel(m.graph.reversed()), {}};
  r.arc_map.resize(m.arc_count());
  for (std::size_t k = 0; k < m.arc_count(); ++k) {
    const auto& a = m.arcs.arc(static_cast<ArcId>(k));
    auto j = r.model.arcs.find(a.to, a.from);
    if (!j) throw NumericalError("reversed arc missing");
    r.arc_map[k] = *j;
  }
  return r;
}

std::vector<double> div_vertex(const DirectedGraph& g, std::span<const double> theta) {
  require(theta.size() == g.edge_count(), "div_vertex: theta must be defined on every edge");
  std::vector<double> d(g.vertex_count(), 0.0);
  for (std::size_t e = 0; e < theta.size(); ++e) {
    const auto& ed = g.edge(static_cast<EdgeId>(e));
    d[static_cast<std::size_t>(ed.tail)] += theta[e];
    d[static_cast<std::size_t>(ed.head)] -= theta[e];
  }
  return d;
}

std::vector<double> div_arc(const ArcGraph& h, std::span<const double> theta) {
  require(theta.size() == h.arc_count(), "div_arc: Theta must be defined on every arc");
  std::vector<double> d(h.node_count(), 0.0);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const auto& a = h.arc(static_cast<ArcId>(k));
    d[static_cast<std::size_t>(a.from)] += theta[k];
    d[static_cast<std::size_t>(a.to)] -= theta[k];
  }
  return d;
}

}  // namespace hypwalk
