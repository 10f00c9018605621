#include "panelgls/estimators.hpp"

#include <string>

#include "panelgls/errors.hpp"

namespace panelgls {

std::string method_name(Method m) {
  switch (m) {
    case Method::ols: return "ols";
    case Method::ugls: return "ugls";
    case Method::fgls: return "fgls";
    case Method::fgls_iter: return "iter";
    case Method::breve: return "breve";
    case Method::alpha_two_step: return "alpha2";
    case Method::cross_section: return "xsec";
    case Method::moore_penrose: return "moore_penrose";
  }
  return "unknown";
}

namespace {

struct GlsFit {
  Matrix coef;       // p x N
  Matrix residuals;  // rows x N
};

// Per-unit (Z' W^{-1} Z)^{-1} Z' W^{-1} y with a single prepared weight.
// All regressor blocks go through the solver in one batch.
GlsFit gls_core(const Matrix& y, const std::vector<Matrix>& regs, const WeightSolver& solver) {
  const Eigen::Index rows = y.rows();
  const Eigen::Index n = y.cols();
  const Eigen::Index p = regs.empty() ? 0 : regs.front().cols();
  if (static_cast<Eigen::Index>(regs.size()) != n) {
    throw DimensionError("gls: one regressor block per unit required");
  }

  Matrix stacked(rows, n * p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix& zi = regs[static_cast<std::size_t>(i)];
    if (zi.rows() != rows || zi.cols() != p) {
      throw DimensionError("gls: regressors of unit " + std::to_string(i) + " have the wrong shape");
    }
    stacked.middleCols(i * p, p) = zi;
  }
  const Matrix weighted = solver.solve(stacked);

  GlsFit fit{Matrix(p, n), Matrix(rows, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix& zi = regs[static_cast<std::size_t>(i)];
    const auto wz = weighted.middleCols(i * p, p);
    Matrix normal = zi.transpose() * wz;
    normal = 0.5 * (normal + normal.transpose()).eval();
    const Vector rhs = wz.transpose() * y.col(i);
    if (!(eigen_ratio(normal) * kConditionLimit > 1.0)) {
      throw RankDeficient("gls: regressors of unit " + std::to_string(i) +
                              " are rank deficient under the weight",
                          static_cast<std::size_t>(i));
    }
    fit.coef.col(i) = normal.llt().solve(rhs);
    fit.residuals.col(i) = y.col(i) - zi * fit.coef.col(i);
  }
  return fit;
}

WeightMatrix outer_product_weight(const Matrix& residuals, const char* what) {
  const Eigen::Index dim = residuals.rows();
  const double n = static_cast<double>(residuals.cols());
  Matrix s = residuals * residuals.transpose() / n;
  s = 0.5 * (s + s.transpose()).eval();
  const double floor = static_cast<double>(dim) * 1e-12;
  if (!(eigen_ratio(s) > floor)) {
    throw SingularWeight(std::string(what) + ": residual covariance of order " + std::to_string(dim) +
                         " is singular (N = " + std::to_string(residuals.cols()) +
                         " units; N >= T - S is required)");
  }
  return WeightMatrix::dense(std::move(s));
}

WeightMatrix with_options(WeightMatrix w, double ridge) { return w.with_ridge(ridge); }

// Joint OLS on Z_i = [D, X_i]: coefficients and T x N residuals.
GlsFit joint_ols(const PanelData& panel) {
  std::vector<Matrix> z;
  z.reserve(static_cast<std::size_t>(panel.units()));
  for (Eigen::Index i = 0; i < panel.units(); ++i) z.push_back(panel.joint_regressors(i));
  return gls_core(panel.y, z, WeightSolver(WeightMatrix::identity(panel.periods())));
}

std::vector<Matrix> joint_blocks(const PanelData& panel) {
  std::vector<Matrix> z;
  z.reserve(static_cast<std::size_t>(panel.units()));
  for (Eigen::Index i = 0; i < panel.units(); ++i) z.push_back(panel.joint_regressors(i));
  return z;
}

void split_joint(const PanelData& panel, const Matrix& coef, EstimateSet& out) {
  const Eigen::Index s = panel.common_cols();
  out.alpha = coef.topRows(s);
  out.beta = coef.bottomRows(coef.rows() - s);
}

}  // namespace

EstimateSet gls_with_solver(const TransformedPanel& tp, const WeightSolver& solver, Method method) {
  if (solver.dim() != tp.rows()) {
    throw DimensionError("gls: weight of order " + std::to_string(solver.dim()) +
                         " does not match T - S = " + std::to_string(tp.rows()));
  }
  GlsFit fit = gls_core(tp.yt, tp.xt, solver);
  EstimateSet out;
  out.method = method;
  out.beta = std::move(fit.coef);
  out.residuals = std::move(fit.residuals);
  out.iterations = 1;
  return out;
}

EstimateSet ols(const TransformedPanel& tp) {
  EstimateSet out = gls_with_solver(tp, WeightSolver(WeightMatrix::identity(tp.rows())), Method::ols);
  out.iterations = 0;
  return out;
}

EstimateSet ugls(const TransformedPanel& tp, const WeightMatrix& w) {
  EstimateSet out = gls_with_solver(tp, WeightSolver(w), Method::ugls);
  out.weight_used = w;
  return out;
}

WeightMatrix sample_weight(const TransformedPanel& tp, const EstimateSet& ols_result) {
  if (ols_result.residuals.rows() != tp.rows() || ols_result.residuals.cols() != tp.units()) {
    throw DimensionError("sample_weight: residuals do not belong to this transformed panel");
  }
  return outer_product_weight(ols_result.residuals, "sample_weight");
}

EstimateSet fgls(const TransformedPanel& tp, const FglsOptions& options) {
  WeightMatrix w = options.weight_override
                       ? *options.weight_override
                       : with_options(sample_weight(tp, ols(tp)), options.ridge);
  EstimateSet out = gls_with_solver(tp, WeightSolver(w), Method::fgls);
  out.weight_used = std::move(w);
  return out;
}

EstimateSet iterated_fgls(const TransformedPanel& tp, int steps, const FglsOptions& options) {
  if (steps < 1) throw DimensionError("iterated_fgls: need at least one step");
  EstimateSet current;
  try {
    current = fgls(tp, options);
  } catch (const SingularWeight& e) {
    throw SingularWeight(std::string(e.what()) + " (step 1)", 1);
  }
  if (steps == 1) return current;

  for (int h = 2; h <= steps; ++h) {
    WeightMatrix w = [&] {
      try {
        return with_options(outer_product_weight(current.residuals, "iterated_fgls"), options.ridge);
      } catch (const SingularWeight& e) {
        throw SingularWeight(std::string(e.what()) + " (step " + std::to_string(h) + ")", h);
      }
    }();
    current = gls_with_solver(tp, WeightSolver(w), Method::fgls_iter);
    current.weight_used = std::move(w);
  }
  current.method = Method::fgls_iter;
  current.iterations = steps;
  return current;
}

EstimateSet joint_breve(const PanelData& panel, const BreveOptions& options) {
  const Eigen::Index t = panel.periods();
  WeightMatrix w = WeightMatrix::identity(t);
  if (options.weight_override) {
    w = *options.weight_override;
  } else {
    const GlsFit first = joint_ols(panel);
    const double n = static_cast<double>(panel.units());
    Matrix s = first.residuals * first.residuals.transpose() / n;
    if (panel.common_cols() > 0) {
      const Matrix& d = panel.d;
      const Matrix p_d = d * (d.transpose() * d).llt().solve(d.transpose());
      s += (s.trace() / n) * p_d;
    }
    s = 0.5 * (s + s.transpose()).eval();
    if (!(eigen_ratio(s) > static_cast<double>(t) * 1e-12)) {
      throw SingularWeight("joint_breve: augmented residual covariance is singular");
    }
    w = WeightMatrix::dense(std::move(s)).with_ridge(options.ridge);
  }
  GlsFit fit = gls_core(panel.y, joint_blocks(panel), WeightSolver(w));
  EstimateSet out;
  out.method = Method::breve;
  split_joint(panel, fit.coef, out);
  out.residuals = std::move(fit.residuals);
  out.weight_used = std::move(w);
  out.iterations = 1;
  return out;
}

EstimateSet joint_gls(const PanelData& panel, const WeightMatrix& w) {
  if (w.dim() != panel.periods()) throw DimensionError("joint_gls: weight must be T x T");
  GlsFit fit = gls_core(panel.y, joint_blocks(panel), WeightSolver(w));
  EstimateSet out;
  out.method = Method::ugls;
  split_joint(panel, fit.coef, out);
  out.residuals = std::move(fit.residuals);
  out.weight_used = w;
  out.iterations = 1;
  return out;
}

EstimateSet joint_moore_penrose(const PanelData& panel) {
  const GlsFit first = joint_ols(panel);
  const double n = static_cast<double>(panel.units());
  const Matrix s_tilde = first.residuals * first.residuals.transpose() / n;
  const OrthoComplement comp = ortho_complement(panel.d);
  Matrix s_hat = comp.project(s_tilde * comp.basis);
  s_hat = 0.5 * (s_hat + s_hat.transpose()).eval();
  if (!(eigen_ratio(s_hat) > static_cast<double>(s_hat.rows()) * 1e-12)) {
    throw SingularWeight("joint_moore_penrose: projected residual covariance is singular");
  }
  const Matrix s_plus = pinv_sandwich(comp.basis, s_hat);

  const Eigen::Index p = panel.common_cols() + panel.unit_cols();
  Matrix coef(p, panel.units());
  Matrix residuals(panel.periods(), panel.units());
  for (Eigen::Index i = 0; i < panel.units(); ++i) {
    const Matrix z = panel.joint_regressors(i);
    const Matrix wz = s_plus * z;
    Matrix normal = z.transpose() * wz;
    normal = 0.5 * (normal + normal.transpose()).eval();
    coef.col(i) = pseudo_inverse(normal) * (wz.transpose() * panel.y.col(i));
    residuals.col(i) = panel.y.col(i) - z * coef.col(i);
  }
  EstimateSet out;
  out.method = Method::moore_penrose;
  split_joint(panel, coef, out);
  out.residuals = std::move(residuals);
  out.weight_used = WeightMatrix::dense(s_plus);
  out.iterations = 1;
  return out;
}

Matrix project_alpha(const PanelData& panel, const Matrix& beta) {
  const Matrix& d = panel.d;
  if (beta.cols() != panel.units() || beta.rows() != panel.unit_cols()) {
    throw DimensionError("project_alpha: beta must be K x N");
  }
  if (d.cols() == 0) return Matrix(0, panel.units());
  if (singular_ratio(d) < kRankTolerance) {
    throw RankDeficient("project_alpha: common regressors are rank deficient");
  }
  Matrix partial = panel.y;
  for (Eigen::Index i = 0; i < panel.units(); ++i) {
    partial.col(i) -= panel.x[static_cast<std::size_t>(i)] * beta.col(i);
  }
  return (d.transpose() * d).llt().solve(d.transpose() * partial);
}

EstimateSet alpha_two_step(const PanelData& panel, const EstimateSet& fgls_result) {
  if (fgls_result.method != Method::fgls && fgls_result.method != Method::fgls_iter) {
    throw DimensionError("alpha_two_step: expects a fgls or iterated fgls result, got " +
                         method_name(fgls_result.method));
  }
  EstimateSet out;
  out.method = Method::alpha_two_step;
  out.beta = fgls_result.beta;
  out.alpha = project_alpha(panel, fgls_result.beta);
  out.residuals = panel.y - panel.d * *out.alpha;
  for (Eigen::Index i = 0; i < panel.units(); ++i) {
    out.residuals.col(i) -= panel.x[static_cast<std::size_t>(i)] * out.beta.col(i);
  }
  out.iterations = fgls_result.iterations;
  return out;
}

PanelData cross_section_view(const PanelData& panel, const Matrix& d_cross) {
  const Eigen::Index t = panel.periods();
  const Eigen::Index n = panel.units();
  const Eigen::Index k = panel.unit_cols();
  if (d_cross.rows() != n) throw DimensionError("cross_section_view: D must have N rows");
  PanelData dual;
  dual.y = panel.y.transpose();
  dual.d = d_cross;
  dual.x.assign(static_cast<std::size_t>(t), Matrix(n, k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix& xi = panel.x[static_cast<std::size_t>(i)];
    for (Eigen::Index s = 0; s < t; ++s) dual.x[static_cast<std::size_t>(s)].row(i) = xi.row(s);
  }
  return dual;
}

PanelData cross_section_view(const PanelData& panel) {
  return cross_section_view(panel, Matrix::Ones(panel.units(), 1));
}

EstimateSet cross_sectional_fgls(const PanelData& panel_t, const FglsOptions& options) {
  EstimateSet out = fgls(transform(panel_t), options);
  out.method = Method::cross_section;
  out.alpha = project_alpha(panel_t, out.beta);
  return out;
}

Vector ols_bias_diagnostic(const LatentStructure& structure, const TransformedPanel& tp,
                           Eigen::Index unit) {
  if (unit < 0 || unit >= tp.units()) throw DimensionError("ols_bias_diagnostic: unit out of range");
  if (structure.f.rows() != tp.complement.rows()) {
    throw DimensionError("ols_bias_diagnostic: factors and panel disagree on T");
  }
  const Matrix f_t = tp.complement.source_cols == 0 ? structure.f : tp.complement.project(structure.f);
  const Matrix& x = tp.xt[static_cast<std::size_t>(unit)];
  const double rows = static_cast<double>(tp.rows());
  const Matrix sxx = x.transpose() * x / rows;
  const Matrix sxf = x.transpose() * f_t / rows;
  return sxx.llt().solve(sxf * structure.loadings.col(unit));
}

}  // namespace panelgls
