#include "panelgls/inference.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "panelgls/errors.hpp"

namespace panelgls {

int default_bandwidth(Eigen::Index periods) {
  return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(periods) / 100.0, 2.0 / 9.0)));
}

double bartlett_weight(int h, int bandwidth) {
  if (h < 0 || h > bandwidth) return 0.0;
  return 1.0 - static_cast<double>(h) / static_cast<double>(bandwidth + 1);
}

Matrix hac_middle(const Matrix& regressors, const Vector& residual, int bandwidth) {
  const Eigen::Index rows = regressors.rows();
  if (residual.size() != rows) throw DimensionError("hac_middle: residual length mismatch");
  if (bandwidth < 0 || bandwidth >= rows) {
    throw BandwidthError("bandwidth " + std::to_string(bandwidth) + " must lie in [0, " +
                         std::to_string(rows) + ")");
  }
  // Scores g_t = u_t x_t; A_h = T^{-1} sum_{t>h} g_t g_{t-h}'.
  const Matrix scores = regressors.array().colwise() * residual.array();
  const double inv_t = 1.0 / static_cast<double>(rows);
  Matrix middle = scores.transpose() * scores * inv_t;
  for (int h = 1; h <= bandwidth; ++h) {
    const Eigen::Index len = rows - h;
    const Matrix a_h = scores.bottomRows(len).transpose() * scores.topRows(len) * inv_t;
    middle += bartlett_weight(h, bandwidth) * (a_h + a_h.transpose());
  }
  return 0.5 * (middle + middle.transpose());
}

namespace {

InferenceSet sandwich_all(const std::vector<Matrix>& regs, const Matrix& weighted_all,
                          const Matrix& residuals, const Matrix& coef, int bandwidth) {
  const Eigen::Index n = residuals.cols();
  const Eigen::Index rows = residuals.rows();
  const Eigen::Index p = coef.rows();
  InferenceSet inf;
  inf.sample_rows = rows;
  inf.cov.reserve(static_cast<std::size_t>(n));
  inf.tstats.resize(p, n);
  inf.se.resize(p, n);
  const double t = static_cast<double>(rows);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix& z = regs[static_cast<std::size_t>(i)];
    const Matrix zhat = weighted_all.middleCols(i * p, p);
    Matrix bread = z.transpose() * zhat / t;
    bread = 0.5 * (bread + bread.transpose()).eval();
    const Matrix bread_inv = spd_inverse(bread);
    const Matrix middle = hac_middle(zhat, residuals.col(i), bandwidth);
    Matrix cov = bread_inv * middle * bread_inv;
    cov = 0.5 * (cov + cov.transpose()).eval();
    for (Eigen::Index k = 0; k < p; ++k) {
      const double se = std::sqrt(std::max(cov(k, k), 0.0) / t);
      inf.se(k, i) = se;
      inf.tstats(k, i) = coef(k, i) / se;
    }
    inf.cov.push_back(std::move(cov));
  }
  return inf;
}

Matrix stack_blocks(const std::vector<Matrix>& regs, Eigen::Index rows) {
  const Eigen::Index p = regs.empty() ? 0 : regs.front().cols();
  Matrix stacked(rows, static_cast<Eigen::Index>(regs.size()) * p);
  for (std::size_t i = 0; i < regs.size(); ++i) {
    stacked.middleCols(static_cast<Eigen::Index>(i) * p, p) = regs[i];
  }
  return stacked;
}

}  // namespace

InferenceSet hac_cov_fgls(const TransformedPanel& tp, const EstimateSet& est, const HacSpec& spec) {
  if (est.residuals.rows() != tp.rows() || est.beta.cols() != tp.units()) {
    throw DimensionError("hac_cov_fgls: estimate does not match the transformed panel");
  }
  if (spec.bandwidth < 0 || spec.bandwidth >= tp.rows()) {
    throw BandwidthError("bandwidth " + std::to_string(spec.bandwidth) + " must lie in [0, " +
                         std::to_string(tp.rows()) + ")");
  }
  const Matrix stacked = stack_blocks(tp.xt, tp.rows());
  Matrix weighted;
  if (spec.mode == HacSpec::Mode::weighted_regressors && est.weight_used) {
    weighted = WeightSolver(*est.weight_used).solve(stacked);
  } else {
    weighted = stacked;
  }
  InferenceSet inf = sandwich_all(tp.xt, weighted, est.residuals, est.beta, spec.bandwidth);
  inf.joint = false;
  return inf;
}

InferenceSet hac_cov_breve(const PanelData& panel, const EstimateSet& est, const HacSpec& spec) {
  if (est.method != Method::breve || !est.alpha || !est.weight_used) {
    throw DimensionError("hac_cov_breve: expects a breve estimate");
  }
  if (spec.bandwidth < 0 || spec.bandwidth >= panel.periods()) {
    throw BandwidthError("bandwidth " + std::to_string(spec.bandwidth) + " must lie in [0, " +
                         std::to_string(panel.periods()) + ")");
  }
  std::vector<Matrix> z;
  z.reserve(static_cast<std::size_t>(panel.units()));
  for (Eigen::Index i = 0; i < panel.units(); ++i) z.push_back(panel.joint_regressors(i));
  const Matrix stacked = stack_blocks(z, panel.periods());
  const Matrix weighted = spec.mode == HacSpec::Mode::weighted_regressors
                              ? WeightSolver(*est.weight_used).solve(stacked)
                              : stacked;
  Matrix coef(est.alpha->rows() + est.beta.rows(), est.beta.cols());
  coef << *est.alpha, est.beta;
  InferenceSet inf = sandwich_all(z, weighted, est.residuals, coef, spec.bandwidth);
  inf.joint = true;
  return inf;
}

WaldStat wald_statistic(const Vector& theta, const Matrix& cov, Eigen::Index sample_rows,
                        const std::vector<Eigen::Index>& block) {
  WaldStat out;
  out.df = static_cast<int>(block.size());
  if (block.empty()) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const auto b = static_cast<Eigen::Index>(block.size());
  Vector th(b);
  Matrix v(b, b);
  for (Eigen::Index r = 0; r < b; ++r) {
    th(r) = theta(block[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < b; ++c) {
      v(r, c) = cov(block[static_cast<std::size_t>(r)], block[static_cast<std::size_t>(c)]);
    }
  }
  v /= static_cast<double>(sample_rows);
  const Eigen::LDLT<Matrix> ldlt(0.5 * (v + v.transpose()));
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() * kConditionLimit > 1.0)) {
    throw SingularError("wald: block covariance is singular");
  }
  out.value = th.dot(ldlt.solve(th));
  return out;
}

void wald_tests(const EstimateSet& est, InferenceSet& inf, Eigen::Index common_cols,
                Eigen::Index intercept_col) {
  const Eigen::Index k = est.beta.rows();
  const Eigen::Index s = inf.joint ? common_cols : 0;
  std::vector<Eigen::Index> gamma;
  std::vector<Eigen::Index> beta;
  for (Eigen::Index j = 0; j < s; ++j) {
    if (j != intercept_col) gamma.push_back(j);
  }
  for (Eigen::Index j = 0; j < k; ++j) beta.push_back(s + j);
  std::vector<Eigen::Index> joint = gamma;
  joint.insert(joint.end(), beta.begin(), beta.end());

  inf.wald.clear();
  inf.wald.reserve(inf.cov.size());
  for (Eigen::Index i = 0; i < est.beta.cols(); ++i) {
    Vector theta(s + k);
    if (s > 0) theta.head(s) = est.alpha->col(i);
    theta.tail(k) = est.beta.col(i);
    const Matrix& cov = inf.cov[static_cast<std::size_t>(i)];
    WaldTriple w;
    w.gamma = wald_statistic(theta, cov, inf.sample_rows, gamma);
    w.beta = wald_statistic(theta, cov, inf.sample_rows, beta);
    w.joint = gamma.empty() && !inf.joint ? WaldStat{std::numeric_limits<double>::quiet_NaN(), 0}
                                          : wald_statistic(theta, cov, inf.sample_rows, joint);
    inf.wald.push_back(w);
  }
}

}  // namespace panelgls
