#include "panelgls/panel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "panelgls/errors.hpp"

namespace panelgls {

void PanelData::validate() const {
  const Eigen::Index t = periods();
  const Eigen::Index n = units();
  if (static_cast<Eigen::Index>(x.size()) != n) {
    throw DimensionError("panel: " + std::to_string(x.size()) + " regressor blocks for " +
                         std::to_string(n) + " units");
  }
  if (n == 0) throw DimensionError("panel: no units");
  const Eigen::Index k = unit_cols();
  if (d.rows() != t) throw DimensionError("panel: D must have T rows");
  if (t <= d.cols() + k) {
    throw DimensionError("panel: need T > S + K, got T=" + std::to_string(t) +
                         " S=" + std::to_string(d.cols()) + " K=" + std::to_string(k));
  }
  if (!y.allFinite() || !d.allFinite()) throw DimensionError("panel: non-finite entry");
  if (d.cols() > 0 && singular_ratio(d) < kRankTolerance) {
    throw RankDeficient("panel: common regressors D are rank deficient");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix& xi = x[static_cast<std::size_t>(i)];
    if (xi.rows() != t || xi.cols() != k) {
      throw DimensionError("panel: unit " + std::to_string(i) + " regressors have shape " +
                           std::to_string(xi.rows()) + "x" + std::to_string(xi.cols()));
    }
    if (!xi.allFinite()) throw DimensionError("panel: non-finite regressor in unit " + std::to_string(i));
    if (k > 0 && singular_ratio(xi) < kRankTolerance) {
      throw RankDeficient("panel: regressors of unit " + std::to_string(i) + " are rank deficient",
                          static_cast<std::size_t>(i));
    }
  }
}

Matrix PanelData::joint_regressors(Eigen::Index unit) const {
  const Matrix& xi = x[static_cast<std::size_t>(unit)];
  Matrix z(periods(), d.cols() + xi.cols());
  z << d, xi;
  return z;
}

Eigen::Index constant_column(const Matrix& d, double tol) {
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    const double first = d(0, j);
    if (first == 0.0) continue;
    if ((d.col(j).array() - first).abs().maxCoeff() <= tol * std::abs(first)) return j;
  }
  return -1;
}

PanelData with_intercept(PanelData panel) {
  if (constant_column(panel.d) >= 0) return panel;
  Matrix d(panel.periods(), panel.d.cols() + 1);
  d << Vector::Ones(panel.periods()), panel.d;
  panel.d = std::move(d);
  return panel;
}

TransformedPanel transform(const PanelData& panel) {
  return transform(panel, ortho_complement(panel.d));
}

TransformedPanel transform(const PanelData& panel, OrthoComplement complement) {
  if (complement.rows() != panel.periods()) {
    throw DimensionError("transform: complement has " + std::to_string(complement.rows()) +
                         " rows, panel has T = " + std::to_string(panel.periods()));
  }
  TransformedPanel out;
  out.complement = std::move(complement);
  if (out.complement.source_cols == 0) {
    out.yt = panel.y;
    out.xt = panel.x;
    return out;
  }
  const Matrix bt = out.complement.basis.transpose();
  out.yt = bt * panel.y;
  out.xt.reserve(panel.x.size());
  for (std::size_t i = 0; i < panel.x.size(); ++i) {
    out.xt.push_back(bt * panel.x[i]);
    const Matrix& xt = out.xt.back();
    if (xt.cols() > 0 && !(xt.norm() > kRankTolerance * panel.x[i].norm())) {
      throw RankDeficient("transform: regressors of unit " + std::to_string(i) + " lie in span(D)", i);
    }
  }
  return out;
}

Matrix LatentStructure::loading_second_moment() const {
  const double n = static_cast<double>(loadings.cols());
  return loadings * loadings.transpose() / n;
}

Matrix LatentStructure::idiosyncratic(Eigen::Index unit) const {
  const auto u = static_cast<std::size_t>(unit);
  if (!xi.empty()) return xi.at(u);
  const Ar1Covariance& c = xi_ar1.at(u);
  const Eigen::Index t = f.rows();
  Matrix out(t, t);
  for (Eigen::Index r = 0; r < t; ++r) {
    for (Eigen::Index s = 0; s < t; ++s) out(r, s) = c.sigma2 * std::pow(c.rho, std::abs(r - s));
  }
  return out;
}

Matrix LatentStructure::average_idiosyncratic() const {
  if (xi.empty() && !xi_ar1.empty()) {
    // Toeplitz: only the T autocovariances need averaging.
    const Eigen::Index t = f.rows();
    Vector acov = Vector::Zero(t);
    for (const Ar1Covariance& c : xi_ar1) {
      double power = c.sigma2;
      for (Eigen::Index h = 0; h < t; ++h) {
        acov(h) += power;
        power *= c.rho;
      }
    }
    acov /= static_cast<double>(xi_ar1.size());
    Matrix out(t, t);
    for (Eigen::Index r = 0; r < t; ++r) {
      for (Eigen::Index s = 0; s < t; ++s) out(r, s) = acov(std::abs(r - s));
    }
    return out;
  }
  if (xi.empty()) throw DimensionError("LatentStructure: no idiosyncratic covariances");
  Matrix sum = Matrix::Zero(xi.front().rows(), xi.front().cols());
  for (const Matrix& m : xi) sum += m;
  return sum / static_cast<double>(xi.size());
}

WeightMatrix oracle_weight(const LatentStructure& structure, const OrthoComplement& complement) {
  const Eigen::Index t = complement.rows();
  if (structure.f.rows() != t) throw DimensionError("oracle_weight: F must have T rows");
  if (structure.loadings.rows() != structure.f.cols()) {
    throw DimensionError("oracle_weight: loadings must have M rows");
  }
  if (structure.units() < 1 || structure.factors() < 1) {
    throw DimensionError("oracle_weight: need N >= 1 and M >= 1");
  }
  const auto covs = static_cast<Eigen::Index>(
      structure.xi.empty() ? structure.xi_ar1.size() : structure.xi.size());
  if (covs != structure.units()) {
    throw DimensionError("oracle_weight: one idiosyncratic covariance per unit required");
  }

  const Matrix b_n = structure.loading_second_moment();
  Eigen::SelfAdjointEigenSolver<Matrix> es(b_n);
  const Vector& ev = es.eigenvalues();
  const double cut = kRankTolerance * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  Eigen::Index keep = 0;
  for (Eigen::Index j = 0; j < ev.size(); ++j) keep += ev(j) > cut ? 1 : 0;
  // Eigenvalues are ascending; the positive ones sit at the end.
  const Matrix basis = es.eigenvectors().rightCols(keep);
  Matrix core = ev.tail(keep).asDiagonal();

  const Matrix f_t = complement.source_cols == 0 ? structure.f : complement.project(structure.f);
  Matrix lowrank = f_t * basis;
  const Matrix xi_n = structure.average_idiosyncratic();
  Matrix full = complement.source_cols == 0 ? xi_n
                                            : Matrix(complement.basis.transpose() * xi_n * complement.basis);
  full = 0.5 * (full + full.transpose()).eval();
  return WeightMatrix::factored(std::move(lowrank), std::move(core), std::move(full));
}

Matrix oracle_covariance(const LatentStructure& structure) {
  return structure.f * structure.loading_second_moment() * structure.f.transpose() +
         structure.average_idiosyncratic();
}

}  // namespace panelgls
