#include "panelgls/dgp.hpp"

#include <cmath>
#include <string>

#include "panelgls/errors.hpp"
#include "panelgls/rng.hpp"

namespace panelgls {

namespace {

// Variate streams of one replication.
constexpr std::uint64_t kFactorStream = 0;
constexpr std::uint64_t kUnitStreamBase = 1;

double draw(const NormalLaw& law, CounterRng& rng) { return law.mean + std::sqrt(law.var) * rng.normal(); }

double draw(const Range& range, CounterRng& rng) { return range.lo + (range.hi - range.lo) * rng.uniform(); }

}  // namespace

void DgpSpec::validate() const {
  if (n <= 0 || n % 2 != 0) throw ConfigError("dgp: N must be positive and even, got " + std::to_string(n));
  if (t <= 2) throw ConfigError("dgp: T must exceed 2, got " + std::to_string(t));
  if (!(std::abs(factor_ar) < 1.0)) throw ConfigError("dgp: |factor_ar| must be < 1");
  if (factor_innov_var < 0.0) throw ConfigError("dgp: factor_innov_var must be >= 0");
  for (const Range* r : {&rho_eps, &rho_v}) {
    if (!(r->lo > -1.0 && r->hi < 1.0 && r->lo <= r->hi)) {
      throw ConfigError("dgp: AR coefficient ranges must lie inside (-1, 1)");
    }
  }
  if (sigma2.lo < 0.0 || sigma2.lo > sigma2.hi) throw ConfigError("dgp: invalid sigma2 range");
  for (const NormalLaw* law : {&b1, &b2, &delta1, &delta3}) {
    if (law->var < 0.0) throw ConfigError("dgp: loading variances must be >= 0");
  }
  if (distinct_regressor_factors && !(std::abs(regressor_factor_corr) <= 1.0)) {
    throw ConfigError("dgp: regressor_factor_corr must lie in [-1, 1]");
  }
}

Vector ar1_path(double rho, double innov_var, Eigen::Index length, CounterRng& rng) {
  Vector path(length);
  if (length == 0) return path;
  const double innov_sd = std::sqrt(innov_var);
  path(0) = std::sqrt(innov_var / (1.0 - rho * rho)) * rng.normal();
  for (Eigen::Index s = 1; s < length; ++s) path(s) = rho * path(s - 1) + innov_sd * rng.normal();
  return path;
}

Matrix ar1_covariance(double rho, double sigma2, Eigen::Index length) {
  Matrix out(length, length);
  for (Eigen::Index r = 0; r < length; ++r) {
    for (Eigen::Index s = 0; s < length; ++s) out(r, s) = sigma2 * std::pow(rho, std::abs(r - s));
  }
  return out;
}

SimulatedPanel simulate(const DgpSpec& spec) {
  spec.validate();
  const Eigen::Index t = spec.t;
  const Eigen::Index n = spec.n;
  const CounterRng root(spec.seed);

  CounterRng factor_rng = root.derive(kFactorStream);
  const Vector f1 = ar1_path(spec.factor_ar, spec.factor_innov_var, t, factor_rng);
  const Vector f2 = ar1_path(spec.factor_ar, spec.factor_innov_var, t, factor_rng);
  const Vector f3 = ar1_path(spec.factor_ar, spec.factor_innov_var, t, factor_rng);
  Vector g1 = f1;
  if (spec.distinct_regressor_factors) {
    const Vector h = ar1_path(spec.factor_ar, spec.factor_innov_var, t, factor_rng);
    const double c = spec.regressor_factor_corr;
    g1 = c * f1 + std::sqrt(1.0 - c * c) * h;
  }

  SimulatedPanel sim;
  PanelData& panel = sim.panel;
  LatentStructure& ls = sim.structure;
  panel.y.resize(t, n);
  panel.d = Matrix::Ones(t, 1);
  panel.x.reserve(static_cast<std::size_t>(n));

  ls.f.resize(t, 2);
  ls.f << f1, f2;
  ls.loadings.resize(2, n);
  ls.eps.resize(t, n);
  ls.gamma.reserve(static_cast<std::size_t>(n));
  ls.delta.reserve(static_cast<std::size_t>(n));
  ls.v.reserve(static_cast<std::size_t>(n));
  ls.xi_ar1.reserve(static_cast<std::size_t>(n));

  sim.alpha = Vector::Constant(n, spec.alpha0);
  sim.beta.resize(1, n);

  for (Eigen::Index i = 0; i < n; ++i) {
    CounterRng rng = root.derive(kUnitStreamBase + static_cast<std::uint64_t>(i));
    const double b1 = draw(spec.b1, rng);
    const double b2 = draw(spec.b2, rng);
    const double d1 = draw(spec.delta1, rng);
    const double d3 = draw(spec.delta3, rng);
    const double rho_eps = draw(spec.rho_eps, rng);
    const double rho_v = draw(spec.rho_v, rng);
    const double sigma2 = draw(spec.sigma2, rng);

    // Innovation variances target Var(eps) = sigma2 and Var(v) = 1.
    const Vector eps = ar1_path(rho_eps, sigma2 * (1.0 - rho_eps * rho_eps), t, rng);
    const Vector v = ar1_path(rho_v, 1.0 - rho_v * rho_v, t, rng);

    const double beta = i < n / 2 ? spec.beta_low : spec.beta_high;
    sim.beta(0, i) = beta;

    // Regressor: D Delta_i + F Gamma_i + V_i with F = (f1, f2); everything
    // not loading on F (f3, and the part of g1 outside f1) sits in V_i.
    Matrix vi(t, 1);
    vi.col(0) = d1 * (g1 - f1) + d3 * f3 + v;
    Matrix xi(t, 1);
    xi.col(0) = Vector::Constant(t, spec.x_intercept) + d1 * f1 + vi.col(0);

    panel.y.col(i) = Vector::Constant(t, spec.alpha0) + beta * xi.col(0) + b1 * f1 + b2 * f2 + eps;
    panel.x.push_back(std::move(xi));

    ls.loadings(0, i) = b1;
    ls.loadings(1, i) = b2;
    ls.eps.col(i) = eps;
    Matrix gamma(2, 1);
    gamma << d1, 0.0;
    ls.gamma.push_back(std::move(gamma));
    ls.delta.push_back(Matrix::Constant(1, 1, spec.x_intercept));
    ls.v.push_back(std::move(vi));
    ls.xi_ar1.push_back({rho_eps, sigma2});
  }
  return sim;
}

}  // namespace panelgls
