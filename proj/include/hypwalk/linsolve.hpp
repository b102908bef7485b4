#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <memory>

namespace hypwalk {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Factorize once, solve many right-hand sides. Sparse LU up to
// kDirectLimit unknowns; above that Jacobi-preconditioned BiCGSTAB, then
// BiCGSTAB with incomplete LU, then sparse LU, each tried if the previous stalls. Every solution is
// checked: ||A x - b||_inf <= 1e-11 (1 + ||b||_inf) or NumericalError.
class LinearSolver {
 public:
  static constexpr Eigen::Index kDirectLimit = 20000;

  explicit LinearSolver(const SparseMatrix& a);
  ~LinearSolver();
  LinearSolver(const LinearSolver&) = delete;
  LinearSolver& operator=(const LinearSolver&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  bool iterative() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hypwalk
