#include "hypwalk/jacobi.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypwalk/error.hpp"

namespace hypwalk {

// Golub-Welsch on the monic Jacobi recurrence for (1-x)^A (1+x)^B on [-1,1],
// with A = b-1, B = a-1, mapped by t = (1+x)/2.
JacobiRule gauss_jacobi01(double a, double b, int n) {
  require(a > 0.0 && b > 0.0, "gauss_jacobi01: parameters must be positive");
  require(n >= 1, "gauss_jacobi01: need at least one node");
  const double A = b - 1.0, B = a - 1.0, s = A + B;
  Eigen::VectorXd diag(n), off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      diag(k) = (B - A) / (s + 2.0);
    } else {
      const double t = 2.0 * k + s;
      diag(k) = (B * B - A * A) / (t * (t + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + A) * (1.0 + B) / ((2.0 + s) * (2.0 + s) * (3.0 + s));
    } else {
      const double t = 2.0 * k + s;
      b2 = 4.0 * k * (k + A) * (k + B) * (k + s) / (t * t * (t + 1.0) * (t - 1.0));
    }
    off(k - 1) = std::sqrt(b2);
  }
  JacobiRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  if (n == 1) {
    rule.nodes[0] = 0.5 * (1.0 + diag(0));
    rule.weights[0] = 1.0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("gauss_jacobi01: eigensolver failed");
  for (int k = 0; k < n; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    rule.nodes[static_cast<std::size_t>(k)] = std::clamp(0.5 * (1.0 + es.eigenvalues()(k)), 0.0, 1.0);
    rule.weights[static_cast<std::size_t>(k)] = v0 * v0;
  }
  const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (auto& w : rule.weights) w /= total;
  return rule;
}

}  // namespace hypwalk
