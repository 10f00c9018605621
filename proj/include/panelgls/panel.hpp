#pragma once

#include <vector>

#include "panelgls/linalg.hpp"
#include "panelgls/weight.hpp"

namespace panelgls {

/// Observed balanced panel y_i = D alpha_i + X_i beta_i + u_i, i = 1..N.
///
/// `y` holds one column per unit; `x[i]` is the T x K regressor block of unit
/// i; `d` is the T x S block of regressors common to all units (S may be 0).
struct PanelData {
  Matrix y;
  std::vector<Matrix> x;
  Matrix d;

  Eigen::Index periods() const { return y.rows(); }
  Eigen::Index units() const { return y.cols(); }
  Eigen::Index common_cols() const { return d.cols(); }
  Eigen::Index unit_cols() const { return x.empty() ? 0 : x.front().cols(); }

  /// Checks shapes, finiteness, T > S + K and the column rank of D and every X_i.
  /// Throws DimensionError or RankDeficient.
  void validate() const;

  /// [D, X_i], the joint regressor matrix of unit i.
  Matrix joint_regressors(Eigen::Index unit) const;
};

/// Index of the first constant column of `d`, or -1 when there is none.
Eigen::Index constant_column(const Matrix& d, double tol = 1e-12);

/// Returns `panel` with a leading column of ones in D unless D already has a
/// constant column.
PanelData with_intercept(PanelData panel);

/// Panel premultiplied by the complement basis: yt = Dperp' y, xt_i = Dperp' X_i.
struct TransformedPanel {
  OrthoComplement complement;
  Matrix yt;
  std::vector<Matrix> xt;

  Eigen::Index rows() const { return yt.rows(); }
  Eigen::Index units() const { return yt.cols(); }
  Eigen::Index unit_cols() const { return xt.empty() ? 0 : xt.front().cols(); }
};

/// De-means (more generally, removes span(D) from) every unit's data.
/// Throws RankDeficient (with the unit) when a unit's regressors lie in span(D).
TransformedPanel transform(const PanelData& panel);
/// Same transform against a caller-supplied complement of the panel's D.
TransformedPanel transform(const PanelData& panel, OrthoComplement complement);

/// sigma2 * rho^{|t-s|}: covariance of a stationary AR(1) with variance sigma2.
struct Ar1Covariance {
  double rho = 0.0;
  double sigma2 = 0.0;
};

/// Latent structure behind a simulated panel. Only simulation code and the
/// oracle estimators ever see it.
///
///   u_i = F b_i + eps_i,   X_i = D Delta_i + F Gamma_i + V_i,
/// with Xi_i the covariance of eps_i.
struct LatentStructure {
  Matrix f;                    // T x M
  Matrix loadings;             // M x N, column i is b_i
  std::vector<Matrix> gamma;   // N blocks, M x K
  std::vector<Matrix> delta;   // N blocks, S x K
  std::vector<Matrix> v;       // N blocks, T x K
  std::vector<Matrix> xi;      // N blocks, T x T
  /// Parametric alternative to `xi` (used when `xi` is empty); avoids storing
  /// N dense T x T blocks for large simulated panels.
  std::vector<Ar1Covariance> xi_ar1;
  Matrix eps;                  // T x N

  Eigen::Index factors() const { return f.cols(); }
  Eigen::Index units() const { return loadings.cols(); }

  /// N^{-1} sum_i b_i b_i'.
  Matrix loading_second_moment() const;
  /// Xi_i, dense.
  Matrix idiosyncratic(Eigen::Index unit) const;
  /// N^{-1} sum_i Xi_i.
  Matrix average_idiosyncratic() const;
};

/// Oracle weight Dperp' (F B_N F' + Xi_N) Dperp in factored form. The core is
/// the positive part of the eigen-decomposition of B_N, so factors with
/// identically zero loadings drop out of the low-rank term.
WeightMatrix oracle_weight(const LatentStructure& structure, const OrthoComplement& complement);

/// S_N = F B_N F' + Xi_N, T x T.
Matrix oracle_covariance(const LatentStructure& structure);

}  // namespace panelgls
