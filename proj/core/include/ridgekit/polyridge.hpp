#pragma once

// Polynomial ridge approximation f(x) ~ p(U^T x; theta) fitted by alternating
// between an exact least-squares solve for theta and a few steepest-descent
// steps for U on the Grassmann manifold.

#include "ridgekit/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ridgekit {

using MultiIndex = std::vector<int>;

/// Total-degree multi-indices in graded lexicographic order:
/// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
struct MultiIndexBasis {
  std::size_t vars = 0;
  std::size_t degree = 0;
  std::vector<MultiIndex> indices;

  std::size_t size() const noexcept { return indices.size(); }
};

MultiIndexBasis multi_indices(std::size_t vars, std::size_t degree);

/// binomial(degree + vars, vars), the size of a total-degree basis.
std::size_t total_degree_count(std::size_t vars, std::size_t degree);

/// Monomials prod_j (y_j / s_j)^{alpha_j} evaluated row-wise. Column order
/// follows the basis; column 0 is all ones.
Matrix design_matrix(const Matrix& y, const MultiIndexBasis& basis, const Vector& y_scale);

struct PolyModel {
  MultiIndexBasis basis;
  Vector theta;
  Vector y_scale;

  std::size_t vars() const noexcept { return basis.vars; }
  /// p evaluated at each row of Y (M x n).
  Vector evaluate(const Matrix& y) const;
  /// Row i holds grad_y p(y_i).
  Matrix gradient(const Matrix& y) const;
};

struct LabeledSamples {
  Matrix x;  // M x m
  Vector f;  // M

  std::size_t count() const noexcept { return static_cast<std::size_t>(x.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(x.cols()); }
  /// Throws unless shapes agree, M >= 1 and all entries are finite.
  void validate() const;
};

enum class FitPhase { theta, grassmann };

struct HistoryEntry {
  std::size_t iteration = 0;
  FitPhase phase = FitPhase::theta;
  double residual = 0.0;
};

struct RidgeModel {
  Frame u;
  PolyModel poly;
  std::vector<HistoryEntry> history;
  std::string init;
  std::uint64_t seed = 0;

  Vector predict(const Matrix& x) const;
};

/// Least-squares theta for ridge coordinates y = U^T x; y_scale is the
/// per-coordinate max |y| (floored at 1e-12). Rank deficiency yields the
/// minimum-norm theta.
PolyModel fit_theta(const LabeledSamples& samples, const Matrix& u, const MultiIndexBasis& basis);
PolyModel fit_theta(const LabeledSamples& samples, const Frame& u, const MultiIndexBasis& basis);

/// Sum of squared residuals sum_i (f_i - p(U^T x_i))^2.
double residual(const LabeledSamples& samples, const Matrix& u, const PolyModel& poly);
double residual(const LabeledSamples& samples, const RidgeModel& model);

/// dJ/dU = -2 sum_i r_i x_i grad_y p(y_i)^T with theta held fixed.
Matrix euclidean_grad_U(const LabeledSamples& samples, const Matrix& u, const PolyModel& poly);

/// Horizontal projection (I - U U^T) G of a Euclidean gradient.
Matrix project_tangent(const Matrix& u, const Matrix& euclidean_grad);

struct DescentOptions {
  std::size_t max_steps = 10;
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  std::size_t max_backtracks = 30;
  double gradient_tolerance = 1e-10;  // relative to (1 + J)
};

struct DescentResult {
  Matrix basis;  // final iterate as produced by the retraction
  Frame frame;   // same span, sign-normalized
  double residual = 0.0;  // J at `basis` with the fixed theta
  std::size_t steps = 0;
  bool stalled = false;   // line search exhausted its backtracks
};

/// Steepest descent in U with theta fixed: U <- polar(U - t G_tangent), t from
/// Armijo backtracking. Stops after max_steps, on a small tangent gradient, or
/// when the line search stalls; J never increases.
DescentResult grassmann_descent(const LabeledSamples& samples, const Matrix& u0, const PolyModel& poly,
                                const DescentOptions& options = {});

inline constexpr std::size_t kDefaultIterations = 20;

/// Alternating minimization: `iterations` rounds of {fit theta, descend in U},
/// finishing with a theta refit so the returned theta is optimal for the
/// returned U. History records J after every half step.
RidgeModel alternate_fit(const LabeledSamples& samples, std::size_t n, std::size_t degree, const Frame& u0,
                         std::size_t iterations, const DescentOptions& options = {});

/// Orthonormalized standard-Gaussian m x n matrix.
Frame random_frame(std::size_t m, std::size_t n, std::uint64_t seed);

/// Mean of |f - p(U^T x)| / |f| over the samples. Throws
/// Error("relative error undefined") if any f is zero.
double test_error(const RidgeModel& model, const LabeledSamples& test);

}  // namespace ridgekit
