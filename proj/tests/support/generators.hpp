#pragma once

// Hand-rolled random instances for property-style tests.

#include "ridgekit/linalg.hpp"
#include "ridgekit/sampling.hpp"

#include <cstdint>

namespace ridgekit::testing {

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = rng.normal();
  }
  return a;
}

inline Matrix random_symmetric(Eigen::Index m, Rng& rng) {
  const Matrix a = gaussian_matrix(m, m, rng);
  return 0.5 * (a + a.transpose());
}

/// Haar-ish random orthogonal matrix (QR of a Gaussian matrix, R-diagonal positive).
inline Matrix random_rotation(Eigen::Index n, Rng& rng) {
  const Matrix a = gaussian_matrix(n, n, rng);
  const Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

inline double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace ridgekit::testing
