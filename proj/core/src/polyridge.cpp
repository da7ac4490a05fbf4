#include "ridgekit/polyridge.hpp"

#include "ridgekit/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace ridgekit {

namespace {

void append_degree(std::size_t vars, int remaining, MultiIndex& prefix, std::vector<MultiIndex>& out) {
  if (prefix.size() + 1 == vars) {
    prefix.push_back(remaining);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = remaining; first >= 0; --first) {
    prefix.push_back(first);
    append_degree(vars, remaining - first, prefix, out);
    prefix.pop_back();
  }
}

// powers[j](i, k) = (y_ij / s_j)^k for k = 0..degree.
std::vector<Matrix> scaled_powers(const Matrix& y, const Vector& y_scale, std::size_t degree) {
  const auto cols = static_cast<Eigen::Index>(degree + 1);
  std::vector<Matrix> powers;
  powers.reserve(static_cast<std::size_t>(y.cols()));
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    Matrix p(y.rows(), cols);
    p.col(0).setOnes();
    const Vector z = y.col(j) / y_scale(j);
    for (Eigen::Index k = 1; k < cols; ++k) p.col(k) = p.col(k - 1).cwiseProduct(z);
    powers.push_back(std::move(p));
  }
  return powers;
}

void check_poly_shapes(const Matrix& y, const MultiIndexBasis& basis, const Vector& y_scale) {
  if (static_cast<std::size_t>(y.cols()) != basis.vars || y_scale.size() != y.cols()) {
    throw Error("polynomial dimension mismatch");
  }
  if ((y_scale.array() <= 0.0).any()) throw Error("y_scale must be positive");
}

Vector max_abs_scale(const Matrix& y) {
  Vector scale(y.cols());
  for (Eigen::Index j = 0; j < y.cols(); ++j) scale(j) = std::max(y.col(j).cwiseAbs().maxCoeff(), 1e-12);
  return scale;
}

void check_frame_against(const LabeledSamples& samples, const Matrix& u) {
  if (u.rows() != samples.x.cols()) throw Error("frame and samples disagree on ambient dimension");
}

}  // namespace

std::size_t total_degree_count(std::size_t vars, std::size_t degree) {
  // binomial(degree + vars, vars) via the exact running product.
  std::size_t count = 1;
  for (std::size_t k = 1; k <= vars; ++k) count = count * (degree + k) / k;
  return count;
}

MultiIndexBasis multi_indices(std::size_t vars, std::size_t degree) {
  if (vars < 1) throw Error("multi_indices: need at least one variable");
  MultiIndexBasis basis{vars, degree, {}};
  basis.indices.reserve(total_degree_count(vars, degree));
  MultiIndex prefix;
  for (std::size_t d = 0; d <= degree; ++d) append_degree(vars, static_cast<int>(d), prefix, basis.indices);
  return basis;
}

Matrix design_matrix(const Matrix& y, const MultiIndexBasis& basis, const Vector& y_scale) {
  check_poly_shapes(y, basis, y_scale);
  const auto powers = scaled_powers(y, y_scale, basis.degree);
  Matrix a(y.rows(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    auto col = a.col(static_cast<Eigen::Index>(k));
    col.setOnes();
    const MultiIndex& alpha = basis.indices[k];
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] > 0) col.array() *= powers[j].col(alpha[j]).array();
    }
  }
  return a;
}

Vector PolyModel::evaluate(const Matrix& y) const {
  return design_matrix(y, basis, y_scale) * theta;
}

Matrix PolyModel::gradient(const Matrix& y) const {
  check_poly_shapes(y, basis, y_scale);
  const auto powers = scaled_powers(y, y_scale, basis.degree);
  const Eigen::Index rows = y.rows();
  Matrix grad = Matrix::Zero(rows, y.cols());
  Vector term(rows);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double coeff = theta(static_cast<Eigen::Index>(k));
    if (coeff == 0.0) continue;
    const MultiIndex& alpha = basis.indices[k];
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] == 0) continue;
      term.setConstant(coeff * alpha[j] / y_scale(static_cast<Eigen::Index>(j)));
      for (std::size_t l = 0; l < alpha.size(); ++l) {
        const int power = l == j ? alpha[l] - 1 : alpha[l];
        if (power > 0) term.array() *= powers[l].col(power).array();
      }
      grad.col(static_cast<Eigen::Index>(j)) += term;
    }
  }
  return grad;
}

void LabeledSamples::validate() const {
  if (x.rows() < 1 || x.cols() < 1) throw Error("samples must be nonempty");
  if (f.size() != x.rows()) throw Error("samples: inputs and outputs have different lengths");
  if (!x.allFinite() || !f.allFinite()) throw Error("samples contain non-finite entries");
}

Vector RidgeModel::predict(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != u.ambient_dim()) throw Error("predict: dimension mismatch");
  return poly.evaluate(x * u.matrix());
}

PolyModel fit_theta(const LabeledSamples& samples, const Matrix& u, const MultiIndexBasis& basis) {
  check_frame_against(samples, u);
  const Matrix y = samples.x * u;
  Vector scale = max_abs_scale(y);
  const Matrix a = design_matrix(y, basis, scale);
  return PolyModel{basis, lstsq(a, samples.f), std::move(scale)};
}

PolyModel fit_theta(const LabeledSamples& samples, const Frame& u, const MultiIndexBasis& basis) {
  return fit_theta(samples, u.matrix(), basis);
}

double residual(const LabeledSamples& samples, const Matrix& u, const PolyModel& poly) {
  check_frame_against(samples, u);
  return (samples.f - poly.evaluate(samples.x * u)).squaredNorm();
}

double residual(const LabeledSamples& samples, const RidgeModel& model) {
  return residual(samples, model.u.matrix(), model.poly);
}

Matrix euclidean_grad_U(const LabeledSamples& samples, const Matrix& u, const PolyModel& poly) {
  check_frame_against(samples, u);
  const Matrix y = samples.x * u;
  const Vector r = samples.f - poly.evaluate(y);
  const Matrix grad_y = poly.gradient(y);
  return -2.0 * samples.x.transpose() * (r.asDiagonal() * grad_y);
}

Matrix project_tangent(const Matrix& u, const Matrix& euclidean_grad) {
  return euclidean_grad - u * (u.transpose() * euclidean_grad);
}

DescentResult grassmann_descent(const LabeledSamples& samples, const Matrix& u0, const PolyModel& poly,
                                const DescentOptions& options) {
  Matrix u = u0;
  double j = residual(samples, u, poly);
  std::size_t steps = 0;
  bool stalled = false;

  while (steps < options.max_steps) {
    const Matrix g = project_tangent(u, euclidean_grad_U(samples, u, poly));
    const double g2 = g.squaredNorm();
    if (std::sqrt(g2) <= options.gradient_tolerance * (1.0 + j)) break;

    double t = options.initial_step;
    bool accepted = false;
    for (std::size_t b = 0; b <= options.max_backtracks; ++b, t *= options.shrink) {
      Matrix trial = polar_factor(u - t * g);
      const double jt = residual(samples, trial, poly);
      if (jt <= j - options.sufficient_decrease * t * g2) {
        u = std::move(trial);
        j = jt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    ++steps;
  }
  return DescentResult{u, Frame::from_orthonormal(u), j, steps, stalled};
}

RidgeModel alternate_fit(const LabeledSamples& samples, std::size_t n, std::size_t degree, const Frame& u0,
                         std::size_t iterations, const DescentOptions& options) {
  samples.validate();
  if (u0.dim() != n) throw Error("alternate_fit: initial frame has the wrong subspace dimension");
  if (u0.ambient_dim() != samples.dim()) throw Error("alternate_fit: initial frame has the wrong ambient dimension");

  const MultiIndexBasis basis = multi_indices(n, degree);
  Frame u = u0;
  std::vector<HistoryEntry> history;

  for (std::size_t it = 0; it < iterations; ++it) {
    const PolyModel poly = fit_theta(samples, u, basis);
    history.push_back({it, FitPhase::theta, residual(samples, u.matrix(), poly)});
    DescentResult step = grassmann_descent(samples, u.matrix(), poly, options);
    history.push_back({it, FitPhase::grassmann, step.residual});
    u = std::move(step.frame);
  }
  PolyModel poly = fit_theta(samples, u, basis);
  history.push_back({iterations, FitPhase::theta, residual(samples, u.matrix(), poly)});
  return RidgeModel{std::move(u), std::move(poly), std::move(history), {}, 0};
}

Frame random_frame(std::size_t m, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  }
  return orthonormalize(a);
}

double test_error(const RidgeModel& model, const LabeledSamples& test) {
  test.validate();
  if ((test.f.array() == 0.0).any()) throw Error("relative error undefined");
  const Vector fhat = model.predict(test.x);
  return ((test.f - fhat).cwiseAbs().array() / test.f.cwiseAbs().array()).mean();
}

}  // namespace ridgekit
