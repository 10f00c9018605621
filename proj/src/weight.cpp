#include "panelgls/weight.hpp"

#include <string>

#include "panelgls/errors.hpp"

namespace panelgls {

WeightMatrix WeightMatrix::identity(Eigen::Index dim) { return WeightMatrix(dim, Identity{}); }

WeightMatrix WeightMatrix::factored(Matrix lowrank, Matrix core, Matrix full) {
  const Eigen::Index dim = full.rows();
  if (full.cols() != dim || lowrank.rows() != dim || core.rows() != lowrank.cols() ||
      core.cols() != core.rows()) {
    throw DimensionError("WeightMatrix::factored: inconsistent factor shapes");
  }
  return WeightMatrix(dim, Factored{std::move(lowrank), std::move(core), std::move(full)});
}

WeightMatrix WeightMatrix::dense(Matrix w) {
  if (w.rows() != w.cols()) throw DimensionError("WeightMatrix::dense: not square");
  const Eigen::Index dim = w.rows();
  return WeightMatrix(dim, std::move(w));
}

WeightMatrix::Kind WeightMatrix::kind() const {
  switch (repr_.index()) {
    case 0: return Kind::identity;
    case 1: return Kind::factored;
    default: return Kind::dense;
  }
}

Matrix WeightMatrix::to_dense() const {
  switch (kind()) {
    case Kind::identity: return Matrix::Identity(dim_, dim_);
    case Kind::factored: {
      const auto& f = factors();
      return f.lowrank * f.core * f.lowrank.transpose() + f.full;
    }
    case Kind::dense: return dense_matrix();
  }
  return {};
}

WeightMatrix WeightMatrix::with_ridge(double lambda) const {
  if (lambda == 0.0) return *this;
  Matrix w = to_dense();
  const double shift = lambda * w.trace() / static_cast<double>(dim_);
  w.diagonal().array() += shift;
  return dense(std::move(w));
}

double eigen_ratio(const Matrix& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  if (!(top > 0.0)) return 0.0;
  return ev(0) / top;
}

WeightSolver::WeightSolver(const WeightMatrix& w) : dim_(w.dim()) {
  switch (w.kind()) {
    case WeightMatrix::Kind::identity:
      identity_ = true;
      return;
    case WeightMatrix::Kind::factored: {
      const auto& f = w.factors();
      Eigen::LLT<Matrix> core_llt(f.core);
      if (core_llt.info() == Eigen::Success && core_llt.rcond() * kConditionLimit > 1.0) {
        inverse_ = woodbury_inverse(f.full, f.lowrank, f.core);
        use_inverse_ = true;
        return;
      }
      // A singular core has no C^{-1}; fall back to the dense form.
      break;
    }
    case WeightMatrix::Kind::dense:
      break;
  }
  cholesky_.compute(w.to_dense());
  if (cholesky_.info() != Eigen::Success || !(cholesky_.rcond() * kConditionLimit > 1.0)) {
    throw SingularError("weight matrix of order " + std::to_string(dim_) +
                        " is not numerically positive definite");
  }
}

Matrix WeightSolver::solve(const Matrix& rhs) const {
  if (rhs.rows() != dim_) {
    throw DimensionError("WeightSolver::solve: expected " + std::to_string(dim_) + " rows");
  }
  if (identity_) return rhs;
  if (use_inverse_) return inverse_ * rhs;
  return cholesky_.solve(rhs);
}

}  // namespace panelgls
