#include "hypwalk/maxflow.hpp"

#include <algorithm>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>
#include <cmath>
#include <string>

#include "hypwalk/error.hpp"

namespace hypwalk {

namespace {

using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
using FlowGraph = boost::adjacency_list<
    boost::vecS, boost::vecS, boost::directedS,
    boost::property<boost::vertex_color_t, boost::default_color_type,
                    boost::property<boost::vertex_distance_t, long,
                                    boost::property<boost::vertex_predecessor_t, Traits::edge_descriptor>>>,
    boost::property<boost::edge_capacity_t, double,
                    boost::property<boost::edge_residual_capacity_t, double,
                                    boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;

constexpr double kResidualTol = 1e-12;

}  // namespace

MaxFlowResult max_flow(std::size_t n, std::span<const NetworkEdge> edges, VertexId s, VertexId t) {
  require(s != t, "max_flow: source and sink must differ");
  require(s >= 0 && t >= 0 && static_cast<std::size_t>(s) < n && static_cast<std::size_t>(t) < n,
          "max_flow: terminal out of range");
  FlowGraph g(n);
  auto cap = get(boost::edge_capacity, g);
  auto res = get(boost::edge_residual_capacity, g);
  auto rev = get(boost::edge_reverse, g);
  std::vector<Traits::edge_descriptor> forward;
  forward.reserve(edges.size());
  double cap_scale = 0.0;
  for (const auto& e : edges) {
    require(e.capacity >= 0.0 && std::isfinite(e.capacity), "max_flow: capacities must be finite and >= 0");
    require(e.tail >= 0 && e.head >= 0 && static_cast<std::size_t>(e.tail) < n &&
                static_cast<std::size_t>(e.head) < n,
            "max_flow: edge endpoint out of range");
    auto a = add_edge(static_cast<std::size_t>(e.tail), static_cast<std::size_t>(e.head), g).first;
    auto b = add_edge(static_cast<std::size_t>(e.head), static_cast<std::size_t>(e.tail), g).first;
    cap[a] = e.capacity;
    cap[b] = 0.0;
    rev[a] = b;
    rev[b] = a;
    forward.push_back(a);
    cap_scale = std::max(cap_scale, e.capacity);
  }
  const double value = boost::boykov_kolmogorov_max_flow(g, static_cast<std::size_t>(s),
                                                         static_cast<std::size_t>(t));

  MaxFlowResult r;
  r.value = value;
  r.flow.resize(edges.size());
  std::vector<double> net(n, 0.0);
  const double tol = kResidualTol * std::max(1.0, cap_scale);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    double f = cap[forward[i]] - res[forward[i]];
    if (f < -tol || f > edges[i].capacity + tol) throw NumericalError("max_flow: infeasible edge flow");
    f = std::clamp(f, 0.0, edges[i].capacity);
    r.flow[i] = f;
    net[static_cast<std::size_t>(edges[i].tail)] += f;
    net[static_cast<std::size_t>(edges[i].head)] -= f;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (static_cast<VertexId>(v) == s || static_cast<VertexId>(v) == t) continue;
    if (std::abs(net[v]) > 1e-9 * std::max(1.0, value))
      throw NumericalError("max_flow: conservation violated at vertex " + std::to_string(v));
  }

  // Residual reachability from the source gives a minimum cut.
  r.source_side.assign(n, 0);
  std::vector<std::size_t> stack{static_cast<std::size_t>(s)};
  r.source_side[static_cast<std::size_t>(s)] = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto [it, end] = out_edges(v, g); it != end; ++it) {
      auto w = target(*it, g);
      if (!r.source_side[w] && res[*it] > tol) {
        r.source_side[w] = 1;
        stack.push_back(w);
      }
    }
  }
  if (r.source_side[static_cast<std::size_t>(t)]) throw NumericalError("max_flow: sink reachable in residual graph");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (r.source_side[static_cast<std::size_t>(edges[i].tail)] &&
        !r.source_side[static_cast<std::size_t>(edges[i].head)]) {
      r.cut.push_back(i);
      r.cut_value += edges[i].capacity;
    }
  }
  const double flow_out = net[static_cast<std::size_t>(s)];
  if (std::abs(flow_out - r.cut_value) > 1e-9 * std::max(1.0, r.cut_value))
    throw NumericalError("max_flow: flow value and cut value disagree");
  r.value = flow_out;
  return r;
}

MaxFlowResult max_flow_min_cut(const DirectedGraph& g, std::span<const double> capacity, VertexId s,
                               VertexId t) {
  require(capacity.size() == g.edge_count(), "max_flow_min_cut: one capacity per edge required");
  std::vector<NetworkEdge> net;
  net.reserve(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    require(capacity[e] > 0.0, "max_flow_min_cut: capacities must be strictly positive");
    const auto& ed = g.edge(static_cast<EdgeId>(e));
    net.push_back({ed.tail, ed.head, capacity[e]});
  }
  return max_flow(g.vertex_count(), net, s, t);
}

}  // namespace hypwalk
