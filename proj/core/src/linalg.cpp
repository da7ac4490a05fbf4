#include "ridgekit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace ridgekit {

namespace {

// Entries within this relative margin of the column max count as tied.
constexpr double kSignTieTolerance = 1e-12;

Eigen::Index sign_pivot(const Eigen::Ref<const Vector>& column) {
  const double peak = column.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    if (std::abs(column(i)) >= peak * (1.0 - kSignTieTolerance)) return i;
  }
  return 0;
}

void check_frame_shape(Eigen::Index m, Eigen::Index n) {
  if (n < 1 || n > m) {
    throw Error("frame must satisfy 1 <= n <= m (got m=" + std::to_string(m) +
                ", n=" + std::to_string(n) + ")");
  }
}

}  // namespace

void apply_sign_convention(Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    auto col = columns.col(j);
    if (col(sign_pivot(col)) < 0.0) col = -col;
  }
}

bool satisfies_sign_convention(const Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    const auto col = columns.col(j);
    if (col(sign_pivot(col)) < 0.0) return false;
  }
  return true;
}

double orthonormality_defect(const Matrix& columns) {
  const Matrix gram = columns.transpose() * columns;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

Frame Frame::from_orthonormal(Matrix basis) {
  check_frame_shape(basis.rows(), basis.cols());
  if (!basis.allFinite()) throw Error("frame contains non-finite entries");
  const double defect = orthonormality_defect(basis);
  if (defect > kFrameTolerance) {
    throw Error("frame columns are not orthonormal (defect " + std::to_string(defect) + ")");
  }
  apply_sign_convention(basis);
  return Frame(std::move(basis));
}

Frame Frame::identity(std::size_t m, std::size_t n) {
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(n);
  check_frame_shape(rows, cols);
  return Frame(Matrix::Identity(rows, cols));
}

Frame Spectrum::leading(std::size_t k) const {
  const auto cols = static_cast<Eigen::Index>(k);
  check_frame_shape(eigenvectors.rows(), cols);
  return Frame::from_orthonormal(eigenvectors.leftCols(cols));
}

Frame Spectrum::trailing(std::size_t k) const {
  const auto cols = static_cast<Eigen::Index>(k);
  check_frame_shape(eigenvectors.rows(), cols);
  return Frame::from_orthonormal(eigenvectors.rightCols(eigenvectors.cols() - cols));
}

Frame orthonormalize(const Matrix& a) {
  check_frame_shape(a.rows(), a.cols());
  if (!a.allFinite()) throw Error("rank deficient: non-finite entries");
  const Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(sv.size() - 1) <= 1e-12 * sv(0)) throw Error("rank deficient");

  const Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  // Orient Q like A so the factorization has a positive-diagonal R.
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return Frame::from_orthonormal(std::move(q));
}

Matrix complement_basis(const Matrix& u) {
  const Eigen::Index m = u.rows();
  const Eigen::Index n = u.cols();
  if (n >= m) throw Error("no complement");
  const Eigen::HouseholderQR<Matrix> qr(u);
  Matrix full = qr.householderQ() * Matrix::Identity(m, m);
  Matrix v = full.rightCols(m - n);
  apply_sign_convention(v);
  return v;
}

Frame complement(const Frame& u) {
  if (u.dim() >= u.ambient_dim()) throw Error("no complement");
  return Frame::from_orthonormal(complement_basis(u.matrix()));
}

Matrix polar_factor(const Matrix& a) {
  const Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-12 * sv(0)) throw Error("rank deficient");
  return svd.matrixU() * svd.matrixV().transpose();
}

Spectrum sym_eig_desc(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0) throw Error("matrix must be square and nonempty");
  if (!s.allFinite()) throw Error("matrix contains non-finite entries");
  const double scale = s.cwiseAbs().maxCoeff();
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) throw Error("matrix is not symmetric");

  const Matrix sym = 0.5 * (s + s.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("eigensolver failed to converge");

  const Vector& ascending = solver.eigenvalues();
  const Eigen::Index m = ascending.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return ascending(i) > ascending(j); });

  Spectrum out{Vector(m), Matrix(m, m)};
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = ascending(src);
    out.eigenvectors.col(k) = solver.eigenvectors().col(src);
  }
  apply_sign_convention(out.eigenvectors);
  return out;
}

double subspace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("subspace_distance: frames must have equal shapes");
  }
  // sin of the largest principal angle = ||(I - A A^T) B||_2; this stays
  // accurate near zero where sqrt(1 - cos^2) would lose half the digits.
  const Matrix residual = b - a * (a.transpose() * b);
  const Eigen::JacobiSVD<Matrix> svd(residual);
  return std::clamp(svd.singularValues()(0), 0.0, 1.0);
}

double subspace_distance(const Frame& a, const Frame& b) {
  return subspace_distance(a.matrix(), b.matrix());
}

Vector lstsq(const Matrix& a, const Vector& b) {
  if (a.rows() < 1 || a.cols() < 1) throw Error("lstsq: empty system");
  if (a.rows() != b.size()) throw Error("lstsq: dimension mismatch");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(1e-12);
  cod.compute(a);
  return cod.solve(b);
}

}  // namespace ridgekit
