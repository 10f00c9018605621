#pragma once

#include <variant>

#include "panelgls/linalg.hpp"

namespace panelgls {

/// Symmetric GLS weight of order T-S. Either the identity, the factored
/// oracle form U * core * U' + full, or a dense sample matrix.
class WeightMatrix {
public:
  enum class Kind { identity, factored, dense };

  struct Factored {
    Matrix lowrank;  // dim x r
    Matrix core;     // r x r, SPD
    Matrix full;     // dim x dim, SPD
  };

  static WeightMatrix identity(Eigen::Index dim);
  static WeightMatrix factored(Matrix lowrank, Matrix core, Matrix full);
  static WeightMatrix dense(Matrix w);

  Kind kind() const;
  Eigen::Index dim() const { return dim_; }
  Matrix to_dense() const;

  const Factored& factors() const { return std::get<Factored>(repr_); }
  const Matrix& dense_matrix() const { return std::get<Matrix>(repr_); }

  /// Copy with lambda * tr(W)/dim added to the diagonal (densifies factored input).
  WeightMatrix with_ridge(double lambda) const;

private:
  struct Identity {};
  WeightMatrix(Eigen::Index dim, std::variant<Identity, Factored, Matrix> repr)
      : dim_(dim), repr_(std::move(repr)) {}

  Eigen::Index dim_ = 0;
  std::variant<Identity, Factored, Matrix> repr_;
};

/// Ratio lambda_min / lambda_max of a symmetric matrix (0 when lambda_max <= 0).
double eigen_ratio(const Matrix& symmetric);

/// One factorization of a weight, reused for every unit's solve.
/// Factored weights go through woodbury_inverse; dense ones through Cholesky.
class WeightSolver {
public:
  explicit WeightSolver(const WeightMatrix& w);

  /// W^{-1} * rhs. For the identity weight the input is returned unchanged.
  Matrix solve(const Matrix& rhs) const;
  Eigen::Index dim() const { return dim_; }

private:
  Eigen::Index dim_ = 0;
  bool identity_ = false;
  Matrix inverse_;                 // factored path
  Eigen::LLT<Matrix> cholesky_;    // dense path
  bool use_inverse_ = false;
};

}  // namespace panelgls
