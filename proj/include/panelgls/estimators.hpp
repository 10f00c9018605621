#pragma once

// Unit-by-unit coefficient estimators for panels with latent factor
// structure in both regressors and errors.
//
// Every feasible estimator here (fgls, iterated_fgls, joint_breve,
// joint_moore_penrose, cross_sectional_fgls) works from observables alone:
// none of their signatures accept factors, loadings or a factor count. Only
// ugls (through its weight) and ols_bias_diagnostic use latent quantities.

#include <optional>
#include <string>

#include "panelgls/panel.hpp"
#include "panelgls/weight.hpp"

namespace panelgls {

enum class Method { ols, ugls, fgls, fgls_iter, breve, alpha_two_step, cross_section, moore_penrose };

std::string method_name(Method m);

struct EstimateSet {
  Method method = Method::ols;
  Matrix beta;                      // K x N
  std::optional<Matrix> alpha;      // S x N
  Matrix residuals;                 // (T-S) x N, or T x N for the joint estimators
  std::optional<WeightMatrix> weight_used;
  int iterations = 0;
};

struct FglsOptions {
  /// Adds ridge * tr(S)/dim to the diagonal of the sample weight. Off by default.
  double ridge = 0.0;
  /// Replaces the sample weight outright (test hook; e.g. the identity).
  std::optional<WeightMatrix> weight_override;
};

struct BreveOptions {
  double ridge = 0.0;
  /// Replaces the T x T joint weight (test hook).
  std::optional<WeightMatrix> weight_override;
};

/// Per-unit (X_i' X_i)^{-1} X_i' y_i on the transformed panel.
EstimateSet ols(const TransformedPanel& tp);

/// GLS with a known weight of order T-S. With the identity weight the result
/// is bitwise identical to ols().
EstimateSet ugls(const TransformedPanel& tp, const WeightMatrix& w);

/// N^{-1} sum_i u_i u_i' from the residuals of `result`. Throws SingularWeight
/// when lambda_min <= dim * 1e-12 * lambda_max.
WeightMatrix sample_weight(const TransformedPanel& tp, const EstimateSet& ols_result);

/// Feasible GLS with the weight built from OLS residuals.
EstimateSet fgls(const TransformedPanel& tp, const FglsOptions& options = {});

/// `steps` GLS solves in total; steps = 1 is fgls(). Each later step rebuilds
/// the weight from the previous step's residuals.
EstimateSet iterated_fgls(const TransformedPanel& tp, int steps, const FglsOptions& options = {});

/// Joint (alpha_i, beta_i) GLS on Z_i = [D, X_i] with the weight
/// S~ + (tr(S~)/N) P_D, where S~ is the T x T average of OLS residual outer
/// products.
EstimateSet joint_breve(const PanelData& panel, const BreveOptions& options = {});

/// Joint GLS on Z_i = [D, X_i] with a known nonsingular T x T weight. The
/// beta part equals ugls() with the weight Dperp' W Dperp.
EstimateSet joint_gls(const PanelData& panel, const WeightMatrix& w);

/// Joint GLS on Z_i with the Moore-Penrose weight S~^+ = Dperp S^{-1} Dperp'
/// and a pseudo-inverted normal matrix. Returns alpha = 0 and the fgls beta
/// up to rounding; kept as a numerical check of that cancellation.
EstimateSet joint_moore_penrose(const PanelData& panel);

/// alpha_i = (D'D)^{-1} D'(y_i - X_i beta_i) for a given beta (K x N).
Matrix project_alpha(const PanelData& panel, const Matrix& beta);

/// Two-step intercepts from a FGLS or iterated FGLS fit. Only unbiased when
/// the latent factors are orthogonal to D, which is not (and cannot be) checked.
EstimateSet alpha_two_step(const PanelData& panel, const EstimateSet& fgls_result);

/// Dual panel for cross-sectional regressions: one "unit" per period with the
/// N x K regressor block X_t and common N x S regressors `d_cross`.
PanelData cross_section_view(const PanelData& panel, const Matrix& d_cross);
/// cross_section_view with d_cross = ones(N).
PanelData cross_section_view(const PanelData& panel);

/// Feasible GLS on a dual (period-indexed) panel; alpha holds the projection
/// intercepts per period.
EstimateSet cross_sectional_fgls(const PanelData& panel_t, const FglsOptions& options = {});

/// Plug-in OLS bias (X'X/T)^{-1} (X'F/T) b_i on transformed data, for one unit.
Vector ols_bias_diagnostic(const LatentStructure& structure, const TransformedPanel& tp,
                           Eigen::Index unit);

/// Per-unit GLS given a prepared weight; shared by the estimators above.
/// Fills beta and residuals.
EstimateSet gls_with_solver(const TransformedPanel& tp, const WeightSolver& solver, Method method);

}  // namespace panelgls
