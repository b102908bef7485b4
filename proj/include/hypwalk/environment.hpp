#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hypwalk/estimate.hpp"
#include "hypwalk/hypergeom.hpp"
#include "hypwalk/rng.hpp"
#include "hypwalk/weights.hpp"

namespace hypwalk {

struct Environment {
  std::vector<double> u;      // per edge, grouped by tail vertex
  std::vector<double> omega;  // per arc
};

// Rejection sampler: Dirichlet(alpha) proposals accepted with probability
// prod_j ((Z u)_j / min_i Z_ji)^(-beta_j). Throws SamplerError once
// kProbeBatch proposals pass without an acceptance.
inline constexpr std::size_t kProbeBatch = 10000;
void sample_simplex(const HypergeomParams& p, Engine& eng, std::span<double> out);

// Fraction of accepted proposals over n trials.
double acceptance_rate(const HypergeomParams& p, std::size_t n, std::uint64_t seed);

// Per-vertex laws precomputed once for repeated sampling.
class EnvironmentSampler {
 public:
  EnvironmentSampler(const ArcGraphModel& m, const WeightSystem& ws);

  // Vertex x draws from Engine(derive_seed(seed, x)).
  Environment sample(std::uint64_t seed) const;
  std::vector<double> sample_vertex(VertexId x, std::uint64_t seed) const;
  const ArcGraphModel& model() const noexcept { return *m_; }
  const WeightSystem& weights() const noexcept { return ws_; }

 private:
  const ArcGraphModel* m_;
  WeightSystem ws_;
  std::vector<HypergeomParams> laws_;
};

std::vector<double> sample_u_vertex(const ArcGraphModel& m, const WeightSystem& ws, VertexId x,
                                    std::uint64_t seed);
Environment sample_environment(const ArcGraphModel& m, const WeightSystem& ws, std::uint64_t seed);

// omega(e, e') = Z u_e' / sum_{e''} Z_{e,e''} u_e''.
Environment environment_from_u(const ArcGraphModel& m, const WeightSystem& ws, std::vector<double> u);

// Row-sum invariants for u (per vertex) and omega (per edge).
void check_environment(const ArcGraphModel& m, const Environment& env, double tol = 1e-12);

// sum_k gamma_k log beta_k, skipping zero exponents.
double log_power(std::span<const double> base, std::span<const double> exponent);

// log of u-tilde^(-theta), u-tilde_e = u_e / sum_{e'} Z_{e,e'} u_e'.
double log_rn_weight(const ArcGraphModel& m, const WeightSystem& ws, const Environment& env,
                     std::span<const double> theta);
double rn_weight(const ArcGraphModel& m, const WeightSystem& ws, const Environment& env,
                 std::span<const double> theta);

// Plain Monte Carlo of E^{(alpha, ws.xi, Z)}[omega^xi]; sample r uses
// sample(derive_seed(seed, r)).
Estimate moments_mc(const ArcGraphModel& m, const WeightSystem& ws, std::span<const double> xi,
                    std::size_t n_samples, std::uint64_t seed);

// Self-normalized importance estimate of the same moment, Dirichlet proposals
// weighted by the acceptance ratio; for laws where rejection is too slow.
Estimate moments_importance(const ArcGraphModel& m, const WeightSystem& ws, std::span<const double> xi,
                            std::size_t n_samples, std::uint64_t seed);

// Replayable dump: provenance object plus per-vertex u at full precision.
struct EnvironmentDump {
  std::string provenance_json;
  Environment env;
};
void write_environment(std::ostream& os, const ArcGraphModel& m, const Environment& env,
                       const std::string& provenance_json);
EnvironmentDump read_environment(std::istream& is, const ArcGraphModel& m, const WeightSystem& ws);

}  // namespace hypwalk
