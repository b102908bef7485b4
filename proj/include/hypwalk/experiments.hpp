#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "hypwalk/estimate.hpp"
#include "hypwalk/hypergeom.hpp"
#include "hypwalk/lattice.hpp"
#include "hypwalk/parallel.hpp"
#include "hypwalk/weights.hpp"

namespace hypwalk {

using ordered_json = nlohmann::ordered_json;

struct GraphSpec {
  enum class Kind { torus, box, file };
  Kind kind = Kind::torus;
  int d = 3;
  int n = 4;
  int root_direction = 0;
  std::string file;
};

// Lattice weights: alpha is one value or 2d values. z is "ones", "backtrack"
// (Z = z_backtrack when leaving against the entering direction, else 1),
// "random" (i.i.d. uniform on [z_lo, z_hi] from z_seed) or "matrix".
// For phi, alpha and beta are the two parameter vectors and z_matrix is l x n.
struct WeightSpec {
  std::vector<double> alpha{1.0};
  std::vector<double> beta;
  std::string z = "ones";
  double z_backtrack = 1.0;
  double z_lo = 0.5, z_hi = 2.0;
  std::uint64_t z_seed = 1;
  std::vector<std::vector<double>> z_matrix;

  LatticeWeights lattice(int d) const;
  HypergeomParams phi_params() const;
};

struct ExperimentConfig {
  GraphSpec graph;
  WeightSpec weights;
  std::vector<double> s_values{0.5};
  std::vector<double> p_values{1.0};
  std::vector<int> n_values{4, 8, 12};
  std::vector<int> directions;  // empty: the direction attaining kappa
  std::size_t n_environments = 200;
  std::size_t n_samples = 100000;
  std::size_t n_cycles = 20;
  std::size_t cycle_steps = 6;
  std::size_t n_cases = 100;
  std::uint64_t trap_cap = 100000000;
  std::uint64_t seed = 1;
  double quad_tol = 1e-8;
  double z_threshold = 3.0;
  double reversal_z = 4.0;
  double identity_tol = 1e-9;
  double duality_tol = 1e-6;
  ExecutionMode mode = ExecutionMode::parallel;
  int threads = 0;

  // Everything that determines the results; excludes mode and threads.
  ordered_json to_json() const;
};

struct GridEstimate {
  std::string label;
  ordered_json params;
  Estimate estimate;
  std::vector<double> samples;  // per environment, empty if not kept
  std::vector<std::uint64_t> streams;
};

struct Flag {
  std::string name;
  bool pass = false;
  std::string rule;
  ordered_json evidence;
};

struct ExperimentReport {
  std::string experiment;
  ordered_json config;
  ordered_json metadata = ordered_json::object();
  std::vector<GridEstimate> estimates;
  std::vector<Flag> flags;
  std::vector<std::string> notes;

  bool all_pass() const;
  const GridEstimate& estimate(const std::string& label) const;
  const Flag& flag(const std::string& name) const;
};

// Increase across the three largest N: the last three estimates are strictly
// increasing and z(last, third to last) > threshold.
bool significant_increase(const std::vector<Estimate>& by_n, double threshold);

// Hill estimate of the tail index from the k largest values.
double hill_tail_index(std::vector<double> values, std::size_t k);

// alpha all equal and Z depending only on whether the step continues, reverses
// or turns; then all directed edges are exchangeable under the law.
bool exchangeable_directions(const LatticeWeights& w);

ExperimentReport run_green_moment(const ExperimentConfig& cfg);
ExperimentReport run_invariant_measure(const ExperimentConfig& cfg);
ExperimentReport run_reversal_suite(const ExperimentConfig& cfg);
ExperimentReport run_duality_sweep(const ExperimentConfig& cfg);
ExperimentReport run_trap_times(const ExperimentConfig& cfg);

}  // namespace hypwalk
