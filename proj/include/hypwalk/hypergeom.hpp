#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "hypwalk/estimate.hpp"
#include "hypwalk/graph.hpp"
#include "hypwalk/weights.hpp"

namespace hypwalk {

// phi(alpha, beta; Z; u) = prod u_i^(alpha_i - 1) prod (Z u)_j^(-beta_j) on the
// open n-simplex; Z is l x n.
struct HypergeomParams {
  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::MatrixXd z;

  std::size_t n() const noexcept { return alpha.size(); }
  std::size_t l() const noexcept { return beta.size(); }
  void validate() const;
  bool balanced(double tol = 1e-10) const;
  HypergeomParams dual() const;  // (beta, alpha, Z^t)
};

double log_beta_multivariate(std::span<const double> alpha);
double beta_multivariate(std::span<const double> alpha);

double phi_density(const HypergeomParams& p, std::span<const double> u);

struct PhiValue {
  double value = 0.0;
  double log_value = 0.0;
  double error = 0.0;     // |last two refinements| in value units
  int nodes_per_axis = 0;
};

// Tensor Gauss-Jacobi quadrature after stick-breaking; node count doubles until
// the relative change is <= tol. Requires n <= 4.
PhiValue phi_quadrature(const HypergeomParams& p, double tol);

// B(alpha) times the mean of prod (Z u)^(-beta) over Dirichlet(alpha) draws.
Estimate phi_mc(const HypergeomParams& p, std::size_t n_samples, std::uint64_t seed);

// B(alpha)^-1 Phi(alpha, beta, Z) - B(beta)^-1 Phi(beta, alpha, Z^t).
double duality_residual(const HypergeomParams& p, double tol);

// Local parameters at x: alpha over out-edges (tilted by xi entering each),
// beta over in-edges (tilted by xi leaving each), Z rows = in-edges, columns =
// out-edges, all in edge-id order. The tilt is ws.xi plus extra_xi.
HypergeomParams vertex_params(const ArcGraphModel& m, const WeightSystem& ws, VertexId x,
                              std::span<const double> extra_xi = {});

// Vertices whose local parameters change under the tilt xi.
std::vector<VertexId> touched_vertices(const ArcGraphModel& m, std::span<const double> xi);

// log F(alpha; xi; Z) = sum over vertices of log Phi_x.
double log_F_product(const ArcGraphModel& m, const WeightSystem& ws, std::span<const double> extra_xi,
                     double tol);

// log E^{(alpha, ws.xi, Z)}[omega^xi] = xi . log Z + log F(ws.xi + xi) - log F(ws.xi),
// only touched vertices are integrated.
double log_moment_exact(const ArcGraphModel& m, const WeightSystem& ws, std::span<const double> xi,
                        double tol);

// E[omega(k)^s] = Z_k^s Phi_x(alpha + s(delta_e + delta_e')) / Phi_x(alpha).
double marginal_moment(const ArcGraphModel& m, const WeightSystem& ws, ArcId k, double s, double tol);

}  // namespace hypwalk
