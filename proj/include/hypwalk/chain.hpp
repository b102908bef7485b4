#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hypwalk/environment.hpp"
#include "hypwalk/estimate.hpp"
#include "hypwalk/graph.hpp"
#include "hypwalk/parallel.hpp"
#include "hypwalk/rng.hpp"
#include "hypwalk/weights.hpp"

namespace hypwalk {

struct StationaryLaw {
  std::vector<double> pi;
  double residual = 0.0;  // ||pi^T omega - pi^T||_inf
};

// Up to kGthLimit states: GTH state reduction (subtraction free, entrywise
// accurate). Otherwise sparse LU of (omega^T - I) with the last equation
// replaced by sum(pi) = 1, then iterative refinement; power iteration above
// kPowerLimit arcs.
inline constexpr std::size_t kGthLimit = 512;
inline constexpr std::size_t kPowerLimit = 200000;
StationaryLaw stationary(const ArcGraphModel& m, const Environment& env);
double stationarity_residual(const ArcGraphModel& m, std::span<const double> omega, std::span<const double> pi);

// omega-check(e'-check, e-check) = pi(e) omega(e, e') / pi(e'), on the arcs of r.
Environment reverse_environment(const ArcGraphModel& m, const ReversedModel& r, const Environment& env,
                                const StationaryLaw& pi);

// Closed edge sequence e0, ..., en = e0 with consecutive pairs in K.
using Cycle = std::vector<EdgeId>;
std::vector<ArcId> cycle_arcs(const ArcGraph& h, const Cycle& c);
Cycle reversed_cycle(const Cycle& c);
double log_cycle_weight(const ArcGraph& h, std::span<const double> omega, const Cycle& c);
double cycle_weight(const ArcGraph& h, std::span<const double> omega, const Cycle& c);
// Uniform random walk of the given number of steps from start, closed by a
// shortest path back to start.
Cycle random_cycle(const ArcGraph& h, EdgeId start, std::size_t steps, Engine& eng);
// Arc multiplicities of a multiset of cycles.
std::vector<double> cycle_arc_counts(const ArcGraph& h, std::span<const Cycle> cycles);
// log( Z_C F(alpha + N) / F(alpha) ).
double log_cycle_moment_exact(const ArcGraphModel& m, const WeightSystem& ws, std::span<const Cycle> cycles,
                              double tol);

struct CycleComparison {
  Estimate reversed_env;   // E^{(alpha, Z)}[omega-check_{C-check}]
  Estimate reversed_law;   // E^{(alpha-check, Z-check)}[omega_{C-check}]
  double z = 0.0;
  std::optional<double> exact;  // cycle moment formula, when quadrature applies
};

struct WeakReversalReport {
  std::vector<CycleComparison> cycles;
  double max_abs_z = 0.0;
};

// Requires div(alpha) = 0. Sample r of the forward law uses
// derive_seed(seed, 0, r), of the reversed law derive_seed(seed, 1, r).
WeakReversalReport check_weak_reversal(const ArcGraphModel& m, const WeightSystem& ws,
                                       std::span<const Cycle> cycles, std::size_t n_samples,
                                       std::uint64_t seed, bool with_exact = true, double tol = 1e-10,
                                       ExecutionMode mode = ExecutionMode::serial, int threads = 0);

struct HittingCheck {
  EdgeId e;
  double lhs;  // P_{e0}[X_{H+ - 1} = e]: state reduction up to kGthLimit edges, else a sparse solve
  double rhs;  // omega-check(e0-check, e-check)
};

// One entry per predecessor e of e0.
std::vector<HittingCheck> hitting_prob_check(const ArcGraphModel& m, const ReversedModel& r,
                                             const Environment& env, EdgeId e0);

struct GreenResult {
  double green = 0.0;   // expected visits to e0 (time 0 included) before hitting kill
  double escape = 0.0;  // P_{e0}[hit kill before returning to e0]
};

GreenResult green_function_killed(const ArcGraphModel& m, const Environment& env, EdgeId e0, EdgeId kill);

// p = omega(e, e-check) omega(e-check, e) and q = 1 - p from the complementary
// row sums, accurate when p is close to 1.
struct TrapLaw {
  double p_return = 0.0;
  double q_leave = 1.0;
  double mean() const { return 1.0 / q_leave; }
};

TrapLaw trap_law(const ArcGraphModel& m, const Environment& env, EdgeId e, std::optional<EdgeId> rev);

// Number of visits to e before the walk started at e leaves {e, e-check};
// returns cap if the walk is still trapped after cap visits.
std::uint64_t trap_time_sample(const ArcGraphModel& m, const Environment& env, EdgeId e,
                               std::optional<EdgeId> rev, Engine& eng, std::uint64_t cap);

}  // namespace hypwalk
