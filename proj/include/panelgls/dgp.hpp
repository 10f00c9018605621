#pragma once

// Simulation design with heterogeneous slopes, an intercept, and three AR(1)
// latent factors. The error loads on f1 and f2, the single regressor on f1
// and f3, so f1 makes the regressor endogenous:
//
//   y_it = alpha + beta_i x_it + b_i1 f1_t + b_i2 f2_t + eps_it
//   x_it = 0.5 + delta_i1 f1_t + delta_i3 f3_t + v_it
//
// beta_i is beta_low for the first N/2 units and beta_high for the rest.

#include <cstdint>
#include <utility>

#include "panelgls/panel.hpp"
#include "panelgls/rng.hpp"

namespace panelgls {

struct NormalLaw {
  double mean = 0.0;
  double var = 0.0;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct DgpSpec {
  Eigen::Index n = 200;
  Eigen::Index t = 100;
  std::uint64_t seed = 42;

  double factor_ar = 0.5;
  double factor_innov_var = 0.5;

  NormalLaw b1{1.0, 0.2};
  NormalLaw b2{0.0, 0.2};
  NormalLaw delta1{0.5, 0.5};
  NormalLaw delta3{0.0, 0.5};

  Range rho_eps{0.05, 0.95};
  Range rho_v{0.05, 0.95};
  Range sigma2{0.5, 1.5};

  double alpha0 = 1.0;
  double x_intercept = 0.5;
  double beta_low = 1.0;
  double beta_high = 3.0;

  /// Exploratory only: the regressor loads on g1 = c f1 + sqrt(1 - c^2) h
  /// (h an independent AR(1) factor) instead of f1 itself.
  bool distinct_regressor_factors = false;
  double regressor_factor_corr = 0.5;

  /// Throws ConfigError unless N is even and positive, T > 2 and every AR
  /// coefficient lies in (-1, 1).
  void validate() const;
};

struct SimulatedPanel {
  PanelData panel;
  LatentStructure structure;
  Vector alpha;  // N
  Matrix beta;   // 1 x N
};

/// Draws one panel. Identical specs give bitwise-identical output.
SimulatedPanel simulate(const DgpSpec& spec);

/// Stationary AR(1) path: x_0 ~ N(0, innov_var / (1 - rho^2)), then
/// x_t = rho x_{t-1} + sqrt(innov_var) eta_t.
Vector ar1_path(double rho, double innov_var, Eigen::Index length, CounterRng& rng);

/// sigma2 * rho^{|t-s|}, the covariance of a unit-variance-targeted AR(1).
Matrix ar1_covariance(double rho, double sigma2, Eigen::Index length);

}  // namespace panelgls
