#pragma once

// Dense linear algebra kernels and subspace geometry.
//
// A Frame is an m x n matrix with orthonormal columns standing in for the
// point span(U) of the Grassmann manifold G(n, m). n == m is representable
// (a full orthogonal basis) but has no complement. Every Frame obeys a
// deterministic sign convention: in each column the entry of largest absolute
// value is positive (near-ties resolved toward the lowest row index).

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ridgekit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised for violated preconditions and numerical failures across ridgekit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Orthonormality tolerance enforced on every Frame.
inline constexpr double kFrameTolerance = 1e-12;

class Frame {
 public:
  /// Wraps a matrix that already has orthonormal columns. The sign convention
  /// is applied; throws if the columns are not orthonormal to kFrameTolerance
  /// or if the shape violates 1 <= n <= m.
  static Frame from_orthonormal(Matrix basis);

  /// First n columns of the m x m identity.
  static Frame identity(std::size_t m, std::size_t n);

  const Matrix& matrix() const noexcept { return basis_; }
  std::size_t ambient_dim() const noexcept { return static_cast<std::size_t>(basis_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(basis_.cols()); }

 private:
  explicit Frame(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

/// Eigen-decomposition of a symmetric matrix with eigenvalues in descending
/// order and sign-normalized eigenvector columns.
struct Spectrum {
  Vector eigenvalues;
  Matrix eigenvectors;

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
  /// Leading k eigenvectors (active subspace W1). Requires 1 <= k <= m.
  Frame leading(std::size_t k) const;
  /// Trailing m - k eigenvectors (inactive subspace W2). Requires 1 <= k < m.
  Frame trailing(std::size_t k) const;
};

/// Flips column signs in place so that each column's largest-magnitude entry
/// is positive.
void apply_sign_convention(Matrix& columns);

/// True if every column of `columns` already satisfies the sign convention.
bool satisfies_sign_convention(const Matrix& columns);

/// Largest absolute entry of U^T U - I.
double orthonormality_defect(const Matrix& columns);

/// Thin QR orthonormalization of a full-column-rank matrix.
/// Throws Error("rank deficient") when sigma_min <= 1e-12 * sigma_max.
Frame orthonormalize(const Matrix& a);

/// Orthonormal basis of span(U)^perp, so that [U V] is orthogonal.
/// Throws Error("no complement") when n == m.
Frame complement(const Frame& u);
Matrix complement_basis(const Matrix& orthonormal_columns);

/// Polar factor A (A^T A)^{-1/2}. Unlike QR, this commutes with right
/// rotation: polar(A Q) = polar(A) Q.
Matrix polar_factor(const Matrix& a);

/// Symmetric eigensolver; throws if max|S - S^T| > 1e-10 max|S|.
Spectrum sym_eig_desc(const Matrix& s);

/// ||Pa - Pb||_2 = sine of the largest principal angle, in [0, 1].
double subspace_distance(const Frame& a, const Frame& b);
double subspace_distance(const Matrix& a, const Matrix& b);

/// Minimum-norm least-squares solution of A theta ~= b, using a complete
/// orthogonal decomposition with relative rank threshold 1e-12.
Vector lstsq(const Matrix& a, const Vector& b);

}  // namespace ridgekit
