#pragma once

#include <random>

#include "hypwalk/graph.hpp"
#include "hypwalk/weights.hpp"

namespace fixture {

using namespace hypwalk;

// Two vertices joined by two edges each way: 0,1 go 0 -> 1, 2,3 go 1 -> 0.
inline ArcGraphModel two_vertex() { return ArcGraphModel(DirectedGraph(2, {{0, 1}, {0, 1}, {1, 0}, {1, 0}})); }

// Four vertices on a directed square with both diagonals 0 <-> 2 and a chord 1 -> 3.
inline ArcGraphModel four_vertex() {
  return ArcGraphModel(DirectedGraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {2, 0}, {1, 3}}));
}

// Random alpha in [lo, hi] per edge and Z in [zlo, zhi] per arc.
inline WeightSystem random_weights(const ArcGraphModel& m, std::uint64_t seed, double lo = 0.5,
                                   double hi = 2.0, double zlo = 0.5, double zhi = 2.0) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> a(lo, hi), z(zlo, zhi);
  WeightSystem ws;
  for (std::size_t e = 0; e < m.edge_count(); ++e) ws.alpha.push_back(a(eng));
  for (std::size_t k = 0; k < m.arc_count(); ++k) ws.z.push_back(z(eng));
  return ws;
}

inline WeightSystem constant_weights(const ArcGraphModel& m, double a, double z) {
  return {std::vector<double>(m.edge_count(), a), std::vector<double>(m.arc_count(), z), {}};
}

}  // namespace fixture
