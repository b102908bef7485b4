#pragma once

#include <span>
#include <vector>

#include "hypwalk/graph.hpp"

namespace hypwalk {

struct NetworkEdge {
  VertexId tail;
  VertexId head;
  double capacity;
};

struct MaxFlowResult {
  double value = 0.0;
  std::vector<double> flow;        // per input edge
  std::vector<char> source_side;   // per vertex, residual reachability from the source
  std::vector<std::size_t> cut;    // input edges crossing the cut
  double cut_value = 0.0;
};

// Max-flow on an arbitrary network (capacities >= 0). The result is checked:
// feasibility, conservation off {s, t}, and |flow value - cut value| <= 1e-9.
MaxFlowResult max_flow(std::size_t vertex_count, std::span<const NetworkEdge> edges, VertexId source,
                       VertexId sink);

// Same on a DirectedGraph with strictly positive capacities.
MaxFlowResult max_flow_min_cut(const DirectedGraph& g, std::span<const double> capacity,
                               VertexId source, VertexId sink);

}  // namespace hypwalk
