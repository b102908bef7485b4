#include "hypwalk/linsolve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <optional>
#include <string>

#include "hypwalk/error.hpp"

namespace hypwalk {

struct LinearSolver::Impl {
  const SparseMatrix& a;
  std::optional<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu;
  std::optional<Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>>> it;
  std::optional<Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>>> ilu;

  explicit Impl(const SparseMatrix& m) : a(m) {}

  bool factor_ilu() {
    auto& p = ilu.emplace();
    p.preconditioner().setDroptol(1e-5);
    p.preconditioner().setFillfactor(4);
    p.setTolerance(1e-13);
    p.setMaxIterations(2000);
    p.compute(a);
    if (p.info() == Eigen::Success) return true;
    ilu.reset();
    return false;
  }

  void factor_lu() {
    lu.emplace();
    lu->analyzePattern(a);
    lu->factorize(a);
    if (lu->info() != Eigen::Success) throw NumericalError("sparse LU factorization failed (singular system)");
  }

  Eigen::VectorXd refine(const Eigen::VectorXd& b, Eigen::VectorXd x) const {
    for (int r = 0; r < 2; ++r) {
      Eigen::VectorXd res = b - a * x;
      x += lu->solve(res);
    }
    return x;
  }
};

LinearSolver::LinearSolver(const SparseMatrix& a) : impl_(std::make_unique<Impl>(a)) {
  require(a.rows() == a.cols(), "LinearSolver: matrix must be square");
  if (a.rows() <= kDirectLimit) {
    impl_->factor_lu();
    return;
  }
  auto& it = impl_->it.emplace();
  it.setTolerance(1e-14);
  it.setMaxIterations(20000);
  it.compute(a);
  if (it.info() != Eigen::Success) {
    impl_->it.reset();
    if (!impl_->factor_ilu()) impl_->factor_lu();
  }
}

LinearSolver::~LinearSolver() = default;

bool LinearSolver::iterative() const noexcept { return impl_->it.has_value() || impl_->ilu.has_value(); }

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x;
  const double bnorm = b.lpNorm<Eigen::Infinity>();
  auto ok = [&](const Eigen::VectorXd& y) {
    return (b - impl_->a * y).lpNorm<Eigen::Infinity>() <= 1e-11 * (1.0 + bnorm);
  };
  if (impl_->it) {
    x = impl_->it->solve(b);
    if (impl_->it->info() == Eigen::Success && ok(x)) return x;
    impl_->it.reset();
    if (!impl_->factor_ilu()) impl_->factor_lu();
  }
  if (impl_->ilu) {
    x = impl_->ilu->solve(b);
    if (impl_->ilu->info() == Eigen::Success && ok(x)) return x;
    impl_->ilu.reset();
    impl_->factor_lu();
  }
  if (impl_->lu) x = impl_->refine(b, impl_->lu->solve(b));
  const double rnorm = (b - impl_->a * x).lpNorm<Eigen::Infinity>();
  if (!(rnorm <= 1e-11 * (1.0 + bnorm)))
    throw NumericalError("linear solve residual " + std::to_string(rnorm) + " above tolerance");
  return x;
}

}  // namespace hypwalk
