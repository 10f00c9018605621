#pragma once

#include <vector>

#include "panelgls/estimators.hpp"

namespace panelgls {

/// Newey-West settings. The kernel is always Bartlett, 1 - h/(n+1).
struct HacSpec {
  enum class Mode {
    weighted_regressors,  // regressors premultiplied by the inverse GLS weight
    plain                 // raw regressors, OLS sandwich
  };
  int bandwidth = 0;
  Mode mode = Mode::weighted_regressors;
};

/// floor(4 (T/100)^{2/9}).
int default_bandwidth(Eigen::Index periods);

/// Bartlett weight of lag h for bandwidth n; zero beyond n.
double bartlett_weight(int h, int bandwidth);

struct WaldStat {
  double value = 0.0;
  int df = 0;  // 0 when the block is empty (value is NaN)
};

struct WaldTriple {
  WaldStat gamma;  // common-regressor slopes (D columns other than the intercept)
  WaldStat beta;   // unit-specific regressors
  WaldStat joint;  // union of the two
};

/// Per-unit covariance of sqrt(T) (theta_hat - theta). Coefficient order is
/// (alpha, beta) for joint estimates and beta alone otherwise.
struct InferenceSet {
  std::vector<Matrix> cov;
  Matrix tstats;            // p x N
  Matrix se;                // p x N, sqrt(cov_kk / T)
  Eigen::Index sample_rows = 0;  // the T used in the scaling
  std::vector<WaldTriple> wald;
  bool joint = false;       // true when coefficients include alpha
};

/// Bartlett middle matrix A_0 + sum_h w_h (A_h + A_h') for scores r_t * x_t.
/// `regressors` is rows x p, `residual` has `rows` entries.
Matrix hac_middle(const Matrix& regressors, const Vector& residual, int bandwidth);

/// HAC covariance for estimates on the transformed panel (ols, ugls, fgls,
/// iterated fgls, cross-section). In weighted mode the estimate must carry
/// weight_used; estimates without one use the identity.
InferenceSet hac_cov_fgls(const TransformedPanel& tp, const EstimateSet& est, const HacSpec& spec);

/// HAC covariance for the joint breve estimate, order S + K.
InferenceSet hac_cov_breve(const PanelData& panel, const EstimateSet& est, const HacSpec& spec);

/// W = theta_b' (V_b / T)^{-1} theta_b for the coefficient indices in `block`.
WaldStat wald_statistic(const Vector& theta, const Matrix& cov, Eigen::Index sample_rows,
                        const std::vector<Eigen::Index>& block);

/// Fills `inf.wald` with the gamma / beta / joint statistics for each unit.
/// `intercept_col` is the index of the constant column of D (or -1).
void wald_tests(const EstimateSet& est, InferenceSet& inf, Eigen::Index common_cols,
                Eigen::Index intercept_col);

}  // namespace panelgls
