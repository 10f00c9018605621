#include "doctest.h"

#include <type_traits>

#include "panelgls/dgp.hpp"
#include "panelgls/errors.hpp"
#include "panelgls/estimators.hpp"
#include "support.hpp"

using namespace panelgls;
using testing::random_matrix;

// Feasible estimators never see latent quantities.
static_assert(std::is_same_v<decltype(&fgls), EstimateSet (*)(const TransformedPanel&, const FglsOptions&)>);
static_assert(
    std::is_same_v<decltype(&iterated_fgls), EstimateSet (*)(const TransformedPanel&, int, const FglsOptions&)>);
static_assert(std::is_same_v<decltype(&joint_breve), EstimateSet (*)(const PanelData&, const BreveOptions&)>);
static_assert(std::is_same_v<decltype(&cross_sectional_fgls), EstimateSet (*)(const PanelData&, const FglsOptions&)>);

namespace {

Matrix annihilator(const Matrix& d) {
  const Eigen::Index t = d.rows();
  if (d.cols() == 0) return Matrix::Identity(t, t);
  return Matrix::Identity(t, t) - d * (d.transpose() * d).fullPivLu().inverse() * d.transpose();
}

// GLS in the original T coordinates with the weight (M S M)^+.
Matrix oracle_gls(const PanelData& p, const Matrix& s) {
  const Matrix m = annihilator(p.d);
  const Matrix w = Eigen::CompleteOrthogonalDecomposition<Matrix>(m * s * m).pseudoInverse();
  Matrix beta(p.unit_cols(), p.units());
  for (Eigen::Index i = 0; i < p.units(); ++i) {
    const Matrix& x = p.x[i];
    const Matrix a = x.transpose() * m * w * m * x;
    beta.col(i) = a.fullPivLu().solve(x.transpose() * m * w * m * p.y.col(i));
  }
  return beta;
}

Matrix oracle_ols(const PanelData& p) {
  const Eigen::Index t = p.periods();
  return oracle_gls(p, Matrix::Identity(t, t));
}

Matrix residual_outer(const PanelData& p, const Matrix& beta) {
  const Matrix m = annihilator(p.d);
  Matrix s = Matrix::Zero(p.periods(), p.periods());
  for (Eigen::Index i = 0; i < p.units(); ++i) {
    const Vector r = m * (p.y.col(i) - p.x[i] * beta.col(i));
    s += r * r.transpose();
  }
  return s / static_cast<double>(p.units());
}

Matrix oracle_fgls(const PanelData& p) { return oracle_gls(p, residual_outer(p, oracle_ols(p))); }

double rel(const Matrix& a, const Matrix& b) { return max_abs_diff(a, b) / std::max(1.0, b.cwiseAbs().maxCoeff()); }

}  // namespace

TEST_CASE("ols matches the normal equations on de-meaned data") {
  std::mt19937_64 gen(31);
  for (Eigen::Index s : {0, 1, 2}) {
    auto draw = testing::random_panel(gen, 20, 6, s, 2, 0.3);
    const EstimateSet est = ols(transform(draw.panel));
    CHECK(rel(est.beta, oracle_ols(draw.panel)) < 1e-10);
    CHECK(est.method == Method::ols);
  }
}

TEST_CASE("ugls matches the Moore-Penrose form") {
  std::mt19937_64 gen(32);
  auto draw = testing::random_panel(gen, 15, 5, 1, 1, 0.3);
  const Matrix s = testing::random_spd(gen, 15);
  const TransformedPanel tp = transform(draw.panel);
  const EstimateSet est = ugls(tp, WeightMatrix::dense(tp.complement.project(s * tp.complement.basis)));
  CHECK(rel(est.beta, oracle_gls(draw.panel, s)) < 1e-9);
}

TEST_CASE("identity weights reproduce ols bit for bit") {
  std::mt19937_64 gen(33);
  auto draw = testing::random_panel(gen, 12, 8, 1, 2, 0.5);
  const TransformedPanel tp = transform(draw.panel);
  const EstimateSet o = ols(tp);
  CHECK(ugls(tp, WeightMatrix::identity(tp.rows())).beta == o.beta);
  FglsOptions hook;
  hook.weight_override = WeightMatrix::identity(tp.rows());
  CHECK(fgls(tp, hook).beta == o.beta);
}

TEST_CASE("fgls matches a direct T-space computation") {
  std::mt19937_64 gen(34);
  auto draw = testing::random_panel(gen, 10, 30, 2, 1, 1.0);
  const EstimateSet est = fgls(transform(draw.panel));
  CHECK(rel(est.beta, oracle_fgls(draw.panel)) < 1e-8);
  REQUIRE(est.weight_used);
  CHECK(est.weight_used->dim() == 8);
}

TEST_CASE("fgls does not depend on the choice of complement basis") {
  std::mt19937_64 gen(35);
  auto draw = testing::random_panel(gen, 12, 25, 1, 2, 1.0);
  OrthoComplement rotated = ortho_complement(draw.panel.d);
  rotated.basis = (rotated.basis * testing::random_orthogonal(gen, rotated.dim())).eval();
  const Matrix a = fgls(transform(draw.panel)).beta;
  const Matrix b = fgls(transform(draw.panel, rotated)).beta;
  CHECK(rel(a, b) < 1e-8);
  CHECK(rel(iterated_fgls(transform(draw.panel), 3).beta, iterated_fgls(transform(draw.panel, rotated), 3).beta) <
        1e-8);
}

TEST_CASE("scaling y scales beta; scaling X inversely scales beta") {
  std::mt19937_64 gen(36);
  auto draw = testing::random_panel(gen, 10, 20, 1, 1, 1.0);
  const Matrix base = fgls(transform(draw.panel)).beta;
  PanelData scaled_y = draw.panel;
  scaled_y.y *= 3.0;
  CHECK(rel(fgls(transform(scaled_y)).beta, 3.0 * base) < 1e-9);
  PanelData scaled_x = draw.panel;
  for (auto& x : scaled_x.x) x *= 2.0;
  CHECK(rel(fgls(transform(scaled_x)).beta, 0.5 * base) < 1e-9);
}

TEST_CASE("iterated fgls step counting") {
  std::mt19937_64 gen(37);
  auto draw = testing::random_panel(gen, 10, 20, 1, 1, 1.0);
  const TransformedPanel tp = transform(draw.panel);
  const EstimateSet one = iterated_fgls(tp, 1);
  CHECK(one.beta == fgls(tp).beta);

  const EstimateSet two = iterated_fgls(tp, 2);
  CHECK(two.iterations == 2);
  CHECK(two.method == Method::fgls_iter);
  const Matrix manual = oracle_gls(draw.panel, residual_outer(draw.panel, oracle_fgls(draw.panel)));
  CHECK(rel(two.beta, manual) < 1e-8);
  CHECK_THROWS_AS(iterated_fgls(tp, 0), DimensionError);
}

TEST_CASE("fgls needs N >= T - S") {
  std::mt19937_64 gen(38);
  auto draw = testing::random_panel(gen, 20, 5, 1, 1, 1.0);
  const TransformedPanel tp = transform(draw.panel);
  CHECK_THROWS_AS(fgls(tp), SingularWeight);
  try {
    iterated_fgls(tp, 3);
    FAIL("expected SingularWeight");
  } catch (const SingularWeight& e) {
    CHECK(e.step() == 1);
  }
}

TEST_CASE("degenerate regressors report the failing unit") {
  std::mt19937_64 gen(39);
  auto draw = testing::random_panel(gen, 10, 4, 1, 1, 1.0);
  draw.panel.x[2].setConstant(5.0);
  try {
    ols(transform(draw.panel));
    FAIL("expected RankDeficient");
  } catch (const RankDeficient& e) {
    CHECK(e.unit() == 2);
  }
}

TEST_CASE("noiseless data are recovered exactly") {
  std::mt19937_64 gen(40);
  auto draw = testing::random_panel(gen, 14, 6, 2, 2, 0.0);
  const PanelData& p = draw.panel;
  const TransformedPanel tp = transform(p);
  CHECK(max_abs_diff(ols(tp).beta, draw.beta) < 1e-10);
  CHECK(max_abs_diff(project_alpha(p, ols(tp).beta), draw.alpha) < 1e-10);
  CHECK(max_abs_diff(ugls(tp, WeightMatrix::dense(testing::random_spd(gen, tp.rows()))).beta, draw.beta) < 1e-10);
  BreveOptions hook;
  hook.weight_override = WeightMatrix::identity(p.periods());
  const EstimateSet b = joint_breve(p, hook);
  CHECK(max_abs_diff(b.beta, draw.beta) < 1e-10);
  CHECK(max_abs_diff(*b.alpha, draw.alpha) < 1e-10);
}

TEST_CASE("breve equals fgls for beta and the projection for alpha") {
  std::mt19937_64 gen(41);
  auto draw = testing::random_panel(gen, 12, 30, 2, 1, 1.0);
  const PanelData& p = draw.panel;
  const EstimateSet g = fgls(transform(p));
  const EstimateSet b = joint_breve(p);
  CHECK(b.method == Method::breve);
  CHECK(rel(b.beta, g.beta) < 1e-8);
  CHECK(rel(*b.alpha, project_alpha(p, g.beta)) < 1e-8);

  const EstimateSet two = alpha_two_step(p, g);
  CHECK(rel(*two.alpha, *b.alpha) < 1e-8);
  CHECK_THROWS_AS(alpha_two_step(p, ols(transform(p))), DimensionError);
}

TEST_CASE("Moore-Penrose joint estimator cancels alpha") {
  std::mt19937_64 gen(42);
  auto draw = testing::random_panel(gen, 12, 30, 1, 2, 1.0);
  const EstimateSet mp = joint_moore_penrose(draw.panel);
  const EstimateSet g = fgls(transform(draw.panel));
  CHECK(mp.alpha->cwiseAbs().maxCoeff() < 1e-8);
  CHECK(rel(mp.beta, g.beta) < 1e-8);
}

TEST_CASE("joint gls beta equals ugls beta") {
  std::mt19937_64 gen(43);
  auto draw = testing::random_panel(gen, 16, 5, 1, 1, 1.0);
  const Matrix s = testing::random_spd(gen, 16);
  const TransformedPanel tp = transform(draw.panel);
  const EstimateSet u = ugls(tp, WeightMatrix::dense(tp.complement.project(s * tp.complement.basis)));
  const EstimateSet j = joint_gls(draw.panel, WeightMatrix::dense(s));
  CHECK(rel(j.beta, u.beta) < 1e-9);
  REQUIRE(j.alpha);
  CHECK_THROWS_AS(joint_gls(draw.panel, WeightMatrix::identity(5)), DimensionError);
}

TEST_CASE("cross-sectional dual equals fgls on the transposed panel") {
  std::mt19937_64 gen(44);
  auto draw = testing::random_panel(gen, 40, 15, 1, 1, 1.0);
  const PanelData dual = cross_section_view(draw.panel);
  CHECK(dual.units() == 40);
  CHECK(dual.periods() == 15);
  CHECK(dual.x[7](3, 0) == draw.panel.x[3](7, 0));
  const EstimateSet est = cross_sectional_fgls(dual);
  CHECK(est.method == Method::cross_section);
  CHECK(rel(est.beta, oracle_fgls(dual)) < 1e-8);
  CHECK(est.alpha->cols() == 40);
  CHECK_THROWS_AS(cross_section_view(draw.panel, Matrix::Ones(3, 1)), DimensionError);
}

TEST_CASE("ols bias diagnostic is exact when the idiosyncratic error vanishes") {
  std::mt19937_64 gen(45);
  const Eigen::Index t = 30, n = 4;
  LatentStructure ls;
  ls.f = random_matrix(gen, t, 2);
  ls.loadings = random_matrix(gen, 2, n);
  PanelData p;
  p.d = Matrix::Ones(t, 1);
  p.y = Matrix(t, n);
  const Matrix beta = random_matrix(gen, 1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p.x.push_back(ls.f * random_matrix(gen, 2, 1) + random_matrix(gen, t, 1));
    p.y.col(i) = Vector::Constant(t, 0.7) + p.x[i] * beta.col(i) + ls.f * ls.loadings.col(i);
  }
  const TransformedPanel tp = transform(p);
  const EstimateSet o = ols(tp);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector tau = ols_bias_diagnostic(ls, tp, i);
    CHECK(std::abs(o.beta(0, i) - beta(0, i) - tau(0)) < 1e-10);
  }
  CHECK_THROWS_AS(ols_bias_diagnostic(ls, tp, n), DimensionError);
}

TEST_CASE("ugls on the simulation design beats ols") {
  DgpSpec spec;
  spec.n = 40;
  spec.t = 30;
  const SimulatedPanel sim = simulate(spec);
  const TransformedPanel tp = transform(sim.panel);
  const Matrix err_ols = ols(tp).beta - sim.beta;
  const Matrix err_ugls = ugls(tp, oracle_weight(sim.structure, tp.complement)).beta - sim.beta;
  CHECK(err_ugls.squaredNorm() < err_ols.squaredNorm());
}

TEST_CASE("method names") {
  CHECK(method_name(Method::fgls_iter) == "iter");
  CHECK(method_name(Method::cross_section) == "xsec");
  CHECK(method_name(Method::alpha_two_step) == "alpha2");
}
