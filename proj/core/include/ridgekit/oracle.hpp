#pragma once

// Quadrature ground truth for a standard Gaussian input density: the
// conditional mean mu(y) of f over the slice {U y + V z}, the ridge objective
// R(U) = 1/2 ||f - mu(U^T x)||^2, the matrix C = E[grad f grad f^T], a finite
// difference Grassmann gradient of R, and a few closed-form test functions.
//
// Tensor-product rules are only feasible in low dimension; every quadrature
// entry point rejects m > kMaxQuadratureDim.

#include "ridgekit/active_subspace.hpp"
#include "ridgekit/linalg.hpp"
#include "ridgekit/polyridge.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ridgekit {

inline constexpr std::size_t kMaxQuadratureDim = 4;

/// Probabilists' Gauss-Hermite rule: weights sum to one against the standard
/// normal density, nodes are symmetric about zero.
struct GaussHermiteRule {
  Vector nodes;
  Vector weights;

  std::size_t order() const noexcept { return static_cast<std::size_t>(nodes.size()); }
};

/// q-point rule, exact for polynomials of degree <= 2q - 1.
GaussHermiteRule gauss_hermite(std::size_t q);

struct TestFunction {
  using ValueFn = std::function<double(const Eigen::Ref<const Vector>&)>;
  using GradientFn = std::function<Vector(const Eigen::Ref<const Vector>&)>;

  std::string name;
  std::size_t dim = 0;
  ValueFn value;
  GradientFn gradient;

  double operator()(const Eigen::Ref<const Vector>& x) const { return value(x); }
  /// Evaluates f (and grad f) row by row.
  Vector values(const Matrix& x) const;
  Matrix gradients(const Matrix& x) const;
};

/// f(x1, x2) = 5 x1 + sin(10 pi x2).
TestFunction bivariate();
/// f(x) = 1/2 x^T A x + b^T x with A symmetric.
TestFunction quadratic(const Matrix& a, const Vector& b);
/// f(x) = g(U^T x) for a polynomial profile g.
TestFunction exact_ridge(const Frame& u, const PolyModel& g);
/// Embeds `inner` into R^m, ignoring the listed (0-based) coordinates.
TestFunction padded(const TestFunction& inner, const std::vector<std::size_t>& ignored);

/// C = A^2 + b b^T, the exact gradient outer-product mean of quadratic(A, b)
/// under a standard Gaussian input.
Matrix quadratic_C(const Matrix& a, const Vector& b);

/// Named constructor used by the command line:
///   bivariate                  (no parameters)
///   quadratic   a1,...,am      A = diag(a), b = 0
///   sphere      m              1/2 ||x||^2
///   exact_ridge m,n,seed       g(U*^T x), U* = random_frame(m, n, seed)
///   padded      k              bivariate plus k ignored trailing coordinates
/// Throws Error("unknown builtin function") for anything else.
TestFunction builtin(std::string_view name, const std::vector<double>& params = {});

/// Frame U* and profile g behind builtin("exact_ridge", {m, n, seed}).
Frame exact_ridge_frame(std::size_t m, std::size_t n, std::uint64_t seed);
PolyModel exact_ridge_profile(std::size_t n);

enum class Density { standard_gaussian, uniform };

/// mu(y) = E_z[f(U y + V z)] with z ~ N(0, I_{m-n}) by the tensor rule.
/// Only Density::standard_gaussian is supported.
double conditional_mean_mu(const TestFunction& f, const Frame& u, const Vector& y, const GaussHermiteRule& inner,
                           Density density = Density::standard_gaussian);

/// R(U) over the outer tensor rule on x, with mu from the inner rule.
/// Throws Error("tensor quadrature infeasible") if m > kMaxQuadratureDim.
double ridge_error_R(const TestFunction& f, const Frame& u, const GaussHermiteRule& outer,
                     const GaussHermiteRule& inner);

/// R written as a function of the complement basis V (any orthonormal m x (m-n)
/// matrix); smooth in V, which the finite-difference gradient relies on.
double ridge_error_complement(const TestFunction& f, const Matrix& v, const GaussHermiteRule& outer,
                              const GaussHermiteRule& inner);

/// C = sum_k w_k grad f(x_k) grad f(x_k)^T over the m-dimensional tensor rule.
SpectrumEstimate estimate_C_quadrature(const TestFunction& f, const GaussHermiteRule& rule);

struct SweepRow {
  double alpha = 0.0;
  double r = 0.0;
};
using SweepTable = std::vector<SweepRow>;

/// R at U(alpha) = [cos alpha, sin alpha]^T for `angles` evenly spaced alphas
/// over [0, pi], endpoints included. Rows are evaluated in parallel; each row
/// is a fixed-order serial sum.
SweepTable sweep_angle(const TestFunction& f, std::size_t angles, std::size_t outer_q, std::size_t inner_q);

struct GrassmannGradient {
  Matrix tangent;  // m x (m-n), horizontal at V
  double norm = 0.0;
};

inline constexpr double kDefaultFdStep = 1e-5;

/// Central-difference Grassmann gradient of R(V) over the orthonormal tangent
/// basis {U e_i e_j^T}, U = complement(V), with retraction polar(V + h T).
GrassmannGradient grassmann_grad_R_fd(const TestFunction& f, const Frame& v, double step,
                                      const GaussHermiteRule& outer, const GaussHermiteRule& inner);

/// L (2 sqrt(m) + sqrt(m - n)) sqrt(sum tail): the gradient-norm bound at the
/// inactive subspace W2 (Poincare constant 1 for the Gaussian density).
double near_stationary_bound(double lipschitz, std::size_t m, std::size_t n, const std::vector<double>& tail);

/// max_i ||g_i||, a lower bound on the Lipschitz constant.
double lipschitz_estimate(const GradientSet& gradients);

}  // namespace ridgekit
