#include "doctest.h"

#include "panelgls/errors.hpp"
#include "panelgls/linalg.hpp"
#include "support.hpp"

using namespace panelgls;
using testing::random_matrix;
using testing::random_spd;

namespace {

double rel_diff(const Matrix& a, const Matrix& b) {
  return max_abs_diff(a, b) / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("complement of an intercept is orthonormal and annihilates it") {
  std::mt19937_64 gen(1);
  for (Eigen::Index t : {3, 10, 57}) {
    Matrix d = Matrix::Ones(t, 1);
    const OrthoComplement c = ortho_complement(d);
    CHECK(c.dim() == t - 1);
    CHECK((c.basis.transpose() * d).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(max_abs_diff(c.basis.transpose() * c.basis, Matrix::Identity(t - 1, t - 1)) < 1e-12);
    const Matrix demean = Matrix::Identity(t, t) - Matrix::Constant(t, t, 1.0 / t);
    CHECK(max_abs_diff(c.annihilator(), demean) < 1e-12);
  }
}

TEST_CASE("complement columns carry a positive leading entry") {
  std::mt19937_64 gen(2);
  const Matrix d = random_matrix(gen, 12, 3);
  const OrthoComplement c = ortho_complement(d);
  for (Eigen::Index j = 0; j < c.dim(); ++j) {
    Eigen::Index i = 0;
    while (std::abs(c.basis(i, j)) <= 1e-12) ++i;
    CHECK(c.basis(i, j) > 0.0);
  }
}

TEST_CASE("empty D gives the identity complement") {
  const OrthoComplement c = ortho_complement(Matrix(5, 0));
  CHECK(c.basis == Matrix::Identity(5, 5));
}

TEST_CASE("complement rejects S >= T and rank-deficient D") {
  CHECK_THROWS_AS(ortho_complement(Matrix::Ones(3, 3)), DimensionError);
  Matrix d(6, 2);
  d.col(0).setOnes();
  d.col(1).setConstant(2.0);
  CHECK_THROWS_AS(ortho_complement(d), RankDeficient);
  Matrix bad = Matrix::Ones(4, 1);
  bad(2, 0) = std::nan("");
  CHECK_THROWS_AS(ortho_complement(bad), DimensionError);
}

TEST_CASE("Woodbury matches the dense inverse") {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 2 + rep % 25;
    const Eigen::Index r = rep % std::min<Eigen::Index>(4, n);
    const Matrix a = random_spd(gen, n);
    const Matrix b = random_matrix(gen, n, r);
    const Matrix c = random_spd(gen, r, 0.5);
    const Matrix oracle = (b * c * b.transpose() + a).fullPivLu().inverse();
    CHECK(rel_diff(woodbury_inverse(a, b, c), oracle) < 1e-10);
  }
}

TEST_CASE("Woodbury diagonal fast path") {
  std::mt19937_64 gen(4);
  Vector diag = random_matrix(gen, 9, 1).col(0).cwiseAbs().array() + 0.5;
  const Matrix a = diag.asDiagonal();
  const Matrix b = random_matrix(gen, 9, 2);
  const Matrix c = random_spd(gen, 2);
  const Matrix oracle = (b * c * b.transpose() + a).inverse();
  CHECK(rel_diff(woodbury_inverse(a, b, c, true), oracle) < 1e-10);
}

TEST_CASE("Woodbury errors") {
  std::mt19937_64 gen(5);
  const Matrix a = random_spd(gen, 4);
  CHECK_THROWS_AS(woodbury_inverse(a, random_matrix(gen, 3, 1), Matrix::Identity(1, 1)), DimensionError);
  CHECK_THROWS_AS(woodbury_inverse(Matrix::Zero(4, 4), random_matrix(gen, 4, 1), Matrix::Identity(1, 1)),
                  SingularError);
  CHECK_THROWS_AS(woodbury_inverse(Matrix::Zero(4, 4), random_matrix(gen, 4, 1), Matrix::Identity(1, 1), true),
                  SingularError);
}

TEST_CASE("pinv_sandwich matches an orthogonal-decomposition pseudo-inverse") {
  std::mt19937_64 gen(6);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index t = 4 + rep % 20;
    const Eigen::Index m = 1 + rep % (t - 1);
    const Matrix a = random_matrix(gen, t, m);
    const Matrix b = random_spd(gen, m);
    const Matrix oracle = Eigen::CompleteOrthogonalDecomposition<Matrix>(a * b * a.transpose()).pseudoInverse();
    CHECK(rel_diff(pinv_sandwich(a, b), oracle) < 1e-8);
  }
}

TEST_CASE("pinv_sandwich satisfies the Penrose conditions") {
  std::mt19937_64 gen(7);
  const Matrix a = random_matrix(gen, 10, 4);
  const Matrix b = random_spd(gen, 4);
  const Matrix m = a * b * a.transpose();
  const Matrix p = pinv_sandwich(a, b);
  CHECK(max_abs_diff(m * p * m, m) < 1e-9);
  CHECK(max_abs_diff(p * m * p, p) < 1e-9);
  CHECK(max_abs_diff(m * p, (m * p).transpose()) < 1e-9);
}

TEST_CASE("pinv_sandwich rejects rank-deficient A") {
  Matrix a = Matrix::Ones(5, 2);
  CHECK_THROWS_AS(pinv_sandwich(a, Matrix::Identity(2, 2)), RankDeficient);
  CHECK_THROWS_AS(pinv_sandwich(Matrix::Ones(5, 2), Matrix::Identity(3, 3)), DimensionError);
}

TEST_CASE("pseudo_inverse of a rank-one matrix") {
  Vector u(3);
  u << 1.0, 2.0, 2.0;
  const Matrix m = u * u.transpose();
  const Matrix expected = m / 81.0;
  CHECK(max_abs_diff(pseudo_inverse(m), expected) < 1e-14);
}

TEST_CASE("spd_inverse and singular input") {
  std::mt19937_64 gen(8);
  const Matrix s = random_spd(gen, 6);
  CHECK(max_abs_diff(spd_inverse(s) * s, Matrix::Identity(6, 6)) < 1e-12);
  Matrix singular = Matrix::Identity(3, 3);
  singular(2, 2) = 0.0;
  CHECK_THROWS_AS(spd_inverse(singular), SingularError);
  CHECK_THROWS_AS(spd_inverse(Matrix::Ones(2, 3)), DimensionError);
}

TEST_CASE("singular_ratio") {
  CHECK(singular_ratio(Matrix()) == 0.0);
  CHECK(singular_ratio(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 1.0;
  CHECK(singular_ratio(d) == doctest::Approx(0.25));
}
