#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "panelgls/panel.hpp"

namespace testing {

using panelgls::Matrix;
using panelgls::Vector;

inline Matrix random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(gen);
  return m;
}

inline Matrix random_spd(std::mt19937_64& gen, Eigen::Index n, double shift = 1.0) {
  const Matrix a = random_matrix(gen, n, n);
  return a * a.transpose() / static_cast<double>(n) + shift * Matrix::Identity(n, n);
}

inline Matrix random_orthogonal(std::mt19937_64& gen, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(gen, n, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

// D = [1, random columns]; X_i random; y = D alpha_i + X_i beta_i + noise * e.
struct Draw {
  panelgls::PanelData panel;
  Matrix alpha;  // S x N
  Matrix beta;   // K x N
};

inline Draw random_panel(std::mt19937_64& gen, Eigen::Index t, Eigen::Index n, Eigen::Index s,
                         Eigen::Index k, double noise) {
  Draw out;
  auto& p = out.panel;
  p.d = Matrix(t, s);
  if (s > 0) {
    p.d.col(0).setOnes();
    if (s > 1) p.d.rightCols(s - 1) = random_matrix(gen, t, s - 1);
  }
  out.alpha = random_matrix(gen, s, n);
  out.beta = random_matrix(gen, k, n);
  const Matrix e = random_matrix(gen, t, n);
  p.y = Matrix(t, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p.x.push_back(random_matrix(gen, t, k));
    p.y.col(i) = p.d * out.alpha.col(i) + p.x.back() * out.beta.col(i) + noise * e.col(i);
  }
  return out;
}

inline std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "panelgls_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace testing
