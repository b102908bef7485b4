#pragma once

#include <iosfwd>
#include <string>

#include "hypwalk/graph.hpp"
#include "hypwalk/weights.hpp"

namespace hypwalk {

// JSON graph file:
//   {"vertices": 3,
//    "edges": [{"id": 0, "tail": 0, "head": 1, "alpha": 1.0}, ...],
//    "z": [{"vertex": 1, "matrix": [[...], ...]}, ...],
//    "root_edge": 0}
// Edge ids must be 0..|E|-1 in order. A z block gives Z at one vertex with rows
// = in-edges and columns = out-edges in id order; vertices without a block get
// Z = 1. root_edge defaults to 0.
struct GraphFile {
  ArcGraphModel model;
  WeightSystem weights;
  EdgeId root_edge = 0;
};

GraphFile read_graph_file(std::istream& is);
GraphFile read_graph_file(const std::string& path);

}  // namespace hypwalk
