#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypwalk/chain.hpp"
#include "hypwalk/environment.hpp"
#include "hypwalk/lattice.hpp"
#include "hypwalk/weights.hpp"

namespace hypwalk {

// alpha(boundary_+({0, e_i})) by enumerating the edges that leave the pair.
double kappa_direction(const LatticeWeights& w, int i);
// Max over i = 1..d of the above.
double kappa(const LatticeWeights& w);
// max_i 2 sum_{j<=d} alpha_{e_j} - (alpha_{e_i} - alpha_{-e_i}), reported for comparison only.
double kappa_displayed(const LatticeWeights& w);
// Smallest single-edge weight.
double kappa_tilde(const LatticeWeights& w);
// Direction i in 0..d-1 attaining kappa (lowest index on ties).
int kappa_argmax(const LatticeWeights& w);

// Translation-invariant capacities, optionally with an extra amount on the
// single edge leaving the origin in boost_direction.
struct LatticeCapacities {
  int d = 3;
  std::vector<double> per_direction;
  int boost_direction = -1;
  double boost = 0.0;

  std::vector<double> on(const LatticeGraph& g) const;  // special edge gets 1
  static LatticeCapacities uniform(int d, double c);
  static LatticeCapacities from_alpha(const LatticeWeights& w);
};

// alpha + kappa on the edge (0, e_i), i in 0..2d-1.
LatticeCapacities alpha_boosted(const LatticeWeights& w, int direction);

struct MinCutResult {
  double cut = 0.0;            // max-flow value from the origin to the boundary vertex
  double single_vertex = 0.0;  // capacity leaving the origin
  std::size_t cut_edges = 0;
};

// Min cut separating the origin from the boundary of B(0, N).
MinCutResult min_cut_lattice(const LatticeCapacities& c, int n);

struct VertexFlow {
  std::vector<double> theta;  // per torus edge
  double strength = 0.0;      // m: div theta = m delta_0 - m / N^d
  VertexId source = 0;
  double energy = 0.0;        // sum theta^2
  int sweeps = 0;
};

// Feasible transshipment by max-flow (supply at the origin, demand m/N^d at
// every vertex, 0 <= theta <= c), then exact line-search descent of sum theta^2
// over plaquettes and winding loops. Strength 0 gives theta = 0.
VertexFlow build_vertex_flow(const LatticeGraph& torus, std::span<const double> capacity, double m,
                             int max_sweeps = 20000);

struct ArcFlow {
  std::vector<double> theta;  // per arc
  double strength = 0.0;      // gamma: div Theta = gamma sum_e (delta_e0 - delta_e)
  EdgeId source = 0;
};

// Theta(e, e') = (theta(e) + m 1{e = e0}) (theta(e') + m/|E|) / (theta-bar(head e) + m/N^d),
// with theta-bar(x) the out-sum at x. Total flow from e0 of strength m/|E|.
ArcFlow lift_to_arc_flow(const LatticeGraph& torus, const VertexFlow& vf, EdgeId e0);
ArcFlow scaled(const ArcFlow& f, double factor);

struct FlowIdentity {
  double log_ratio = 0.0;                // log omega-check^Theta-check / omega^Theta
  double log_pi_div = 0.0;               // sum_e div Theta(e) log pi(e)
  std::optional<double> log_total;       // gamma sum_e (log pi(e0) - log pi(e)), for total flows
  double max_rel_error = 0.0;            // |a - b| / max(1, |a|, |b|) over the pairs
};

FlowIdentity flow_identity_check(const ArcGraphModel& m, const ReversedModel& r, const Environment& env,
                                 const StationaryLaw& pi, std::span<const double> theta,
                                 std::optional<std::pair<EdgeId, double>> total = std::nullopt);

void write_vertex_flow(std::ostream& os, const LatticeGraph& g, const VertexFlow& f, const std::string& provenance_json);
void write_arc_flow(std::ostream& os, const LatticeGraph& g, const ArcFlow& f, const std::string& provenance_json);

}  // namespace hypwalk
