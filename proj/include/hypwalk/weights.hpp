#pragma once

#include <span>
#include <vector>

#include "hypwalk/graph.hpp"
#include "hypwalk/lattice.hpp"

namespace hypwalk {

// Parameters of the environment law on an arc graph: alpha per edge, Z per
// arc, optional tilt xi per arc (empty means 0).
struct WeightSystem {
  std::vector<double> alpha;
  std::vector<double> z;
  std::vector<double> xi;
};

// Sizes, strict positivity, and tilted validity alpha_e + xi_leaving(e) > 0,
// alpha_e + xi_entering(e) > 0.
void validate_weights(const ArcGraphModel& m, const WeightSystem& ws);

// Sum of xi(e, e') over successors e' of e, and over predecessors.
std::vector<double> xi_leaving(const ArcGraph& h, std::span<const double> xi);
std::vector<double> xi_entering(const ArcGraph& h, std::span<const double> xi);

// alpha-check(e) = alpha(e), Z-check on (e', e) = Z on (e, e'); xi is mapped
// the same way as Z.
WeightSystem reverse_weights(const ReversedModel& r, const WeightSystem& ws);

// Translation-invariant lattice parameters. alpha[k] is the weight of a step
// in direction k; z[i * 2d + j] is Z for entering a vertex by direction i and
// leaving by direction j.
struct LatticeWeights {
  int d = 3;
  std::vector<double> alpha;
  std::vector<double> z;

  double z_at(int in_dir, int out_dir) const {
    return z[static_cast<std::size_t>(in_dir * 2 * d + out_dir)];
  }
  bool dirichlet() const;  // every Z row constant
  void validate() const;
  static LatticeWeights symmetric(int d, double a);
};

// Materialize on a torus or box. On the box, arcs into the boundary vertex and
// out of the special edge get Z = 1, and the special edge gets special_alpha
// (its value does not affect the law of the walk inside the box).
WeightSystem lattice_weight_system(const LatticeGraph& g, const LatticeWeights& w,
                                   double special_alpha = 1.0);

}  // namespace hypwalk
