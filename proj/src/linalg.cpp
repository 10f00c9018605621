#include "panelgls/linalg.hpp"

#include <cmath>
#include <string>

#include "panelgls/errors.hpp"

namespace panelgls {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw DimensionError(std::string(what) + ": non-finite entry");
  }
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

// Cholesky with a conditioning check; shared by every SPD inverse below.
Eigen::LLT<Matrix> checked_llt(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success || !(llt.rcond() * kConditionLimit > 1.0)) {
    throw SingularError(std::string(what) + ": matrix is not numerically positive definite");
  }
  return llt;
}

}  // namespace

double singular_ratio(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s(0) <= 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

OrthoComplement ortho_complement(const Matrix& d) {
  require_finite(d, "ortho_complement");
  const Eigen::Index t = d.rows();
  const Eigen::Index s = d.cols();
  if (s >= t) {
    throw DimensionError("ortho_complement: S = " + std::to_string(s) +
                         " leaves an empty complement for T = " + std::to_string(t));
  }
  OrthoComplement out;
  out.source_cols = s;
  if (s == 0) {
    out.basis = Matrix::Identity(t, t);
    return out;
  }
  if (singular_ratio(d) < kRankTolerance) {
    throw RankDeficient("ortho_complement: common regressors are rank deficient");
  }

  Eigen::HouseholderQR<Matrix> qr(d);
  Matrix q = qr.householderQ() * Matrix::Identity(t, t);
  out.basis = q.rightCols(t - s);

  for (Eigen::Index j = 0; j < out.basis.cols(); ++j) {
    for (Eigen::Index i = 0; i < t; ++i) {
      const double v = out.basis(i, j);
      if (std::abs(v) > 1e-12) {
        if (v < 0.0) out.basis.col(j) *= -1.0;
        break;
      }
    }
  }
  return out;
}

Matrix spd_inverse(const Matrix& m) {
  require_square(m, "spd_inverse");
  auto llt = checked_llt(m, "spd_inverse");
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

Matrix woodbury_inverse(const Matrix& a, const Matrix& b, const Matrix& c, bool a_is_diagonal) {
  require_square(a, "woodbury_inverse(A)");
  require_square(c, "woodbury_inverse(C)");
  if (b.rows() != a.rows() || b.cols() != c.rows()) {
    throw DimensionError("woodbury_inverse: B must be " + std::to_string(a.rows()) + "x" +
                         std::to_string(c.rows()));
  }
  if (b.cols() > a.rows()) {
    throw DimensionError("woodbury_inverse: low-rank part wider than A");
  }
  require_finite(a, "woodbury_inverse(A)");
  require_finite(b, "woodbury_inverse(B)");
  require_finite(c, "woodbury_inverse(C)");

  const Eigen::Index n = a.rows();
  Matrix a_inv;
  if (a_is_diagonal) {
    const Vector diag = a.diagonal();
    const double big = diag.cwiseAbs().maxCoeff();
    const double small = diag.minCoeff();
    if (!(small > 0.0) || big > small * kConditionLimit) {
      throw SingularError("woodbury_inverse: diagonal A is singular");
    }
    a_inv = diag.cwiseInverse().asDiagonal();
  } else {
    a_inv = checked_llt(a, "woodbury_inverse(A)").solve(Matrix::Identity(n, n));
  }
  if (b.cols() == 0) return a_inv;

  const Matrix a_inv_b = a_inv * b;
  Matrix inner = spd_inverse(c) + b.transpose() * a_inv_b;
  inner = 0.5 * (inner + inner.transpose()).eval();
  auto inner_llt = checked_llt(inner, "woodbury_inverse(inner)");
  Matrix out = a_inv - a_inv_b * inner_llt.solve(a_inv_b.transpose());
  return 0.5 * (out + out.transpose());
}

Matrix pinv_sandwich(const Matrix& a, const Matrix& b) {
  require_square(b, "pinv_sandwich(B)");
  if (a.cols() != b.rows()) {
    throw DimensionError("pinv_sandwich: A has " + std::to_string(a.cols()) +
                         " columns but B is of order " + std::to_string(b.rows()));
  }
  require_finite(a, "pinv_sandwich(A)");
  require_finite(b, "pinv_sandwich(B)");
  if (singular_ratio(a) < kRankTolerance) {
    throw RankDeficient("pinv_sandwich: A does not have full column rank");
  }
  const Matrix ata = a.transpose() * a;
  // (A'A)^{-1} A' computed once; the sandwich is then G' B^{-1} G.
  const Matrix g = Eigen::LLT<Matrix>(ata).solve(a.transpose());
  auto b_llt = checked_llt(b, "pinv_sandwich(B)");
  Matrix out = g.transpose() * b_llt.solve(g);
  return 0.5 * (out + out.transpose());
}

Matrix pseudo_inverse(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cut = rel_tol * s(0);
  Vector s_inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) s_inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace panelgls
