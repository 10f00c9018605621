#pragma once

// Dense kernels shared by every estimator: orthonormal complements of the
// common-regressor span, Woodbury inversion of low-rank-plus-full matrices
// and the Moore-Penrose inverse of a full-rank sandwich A B A'.

#include <Eigen/Dense>

namespace panelgls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative singular-value cutoff below which a matrix is treated as rank deficient.
inline constexpr double kRankTolerance = 1e-12;
/// Reciprocal-condition floor for the factorizations behind inverses.
inline constexpr double kConditionLimit = 1e14;

/// Orthonormal basis of the null space of D'. `basis` is T x (T-S).
struct OrthoComplement {
  Eigen::Index source_cols = 0;
  Matrix basis;

  Eigen::Index rows() const { return basis.rows(); }
  Eigen::Index dim() const { return basis.cols(); }

  /// basis' * M, the complement coordinates of the columns of M.
  Matrix project(const Matrix& m) const { return basis.transpose() * m; }
  /// basis * basis', the annihilator of span(D).
  Matrix annihilator() const { return basis * basis.transpose(); }
};

/// Builds the complement of span(D) from a full Householder QR of D.
///
/// The basis is the trailing T-S columns of Q, with each column's sign fixed
/// so that its first entry of magnitude above 1e-12 is positive. An empty D
/// (S = 0) yields the identity of order T.
///
/// Throws DimensionError if S >= T and RankDeficient if sigma_min/sigma_max
/// of D falls below kRankTolerance.
OrthoComplement ortho_complement(const Matrix& d);

/// Ratio of the smallest to the largest singular value (0 for empty or zero input).
double singular_ratio(const Matrix& m);

/// (B C B' + A)^{-1} through A^{-1} - A^{-1} B (C^{-1} + B' A^{-1} B)^{-1} B' A^{-1}.
/// When `a_is_diagonal` is set only the diagonal of A is read.
/// Throws SingularError when an inner factorization is numerically singular.
Matrix woodbury_inverse(const Matrix& a, const Matrix& b, const Matrix& c,
                        bool a_is_diagonal = false);

/// Moore-Penrose inverse of A B A' for A of full column rank and SPD B:
/// A (A'A)^{-1} B^{-1} (A'A)^{-1} A'.
Matrix pinv_sandwich(const Matrix& a, const Matrix& b);

/// SVD-based Moore-Penrose inverse with singular values below
/// `rel_tol * sigma_max` treated as zero.
Matrix pseudo_inverse(const Matrix& m, double rel_tol = 1e-10);

/// Inverse of an SPD matrix through Cholesky; SingularError when the
/// reciprocal condition estimate is below 1/kConditionLimit.
Matrix spd_inverse(const Matrix& m);

/// Entrywise max |a - b|.
inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace panelgls
