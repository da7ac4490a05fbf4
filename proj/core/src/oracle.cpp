#include "ridgekit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace ridgekit {

namespace {

constexpr double kPi = std::numbers::pi;

// Orthonormal probabilists' Hermite recurrence at x. Returns p_q(x) / p_{q-1}(x)
// via `ratio_num`/`ratio_den` and the Christoffel sum sum_{k<q} p_k(x)^2 as
// log(sum), rescaling on the fly so q in the hundreds cannot overflow.
struct HermiteEval {
  double p_q = 0.0;
  double p_qm1 = 0.0;
  double log_christoffel = 0.0;
};

HermiteEval hermite_eval(std::size_t q, double x) {
  double prev = 0.0;
  double cur = 1.0;  // p_0
  double sum = 0.0;
  double log_scale = 0.0;
  constexpr double kBig = 1e150;
  for (std::size_t k = 0; k < q; ++k) {
    sum += cur * cur;
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      prev /= kBig;
      cur /= kBig;
      sum /= kBig * kBig;
      log_scale += std::log(kBig);
    }
  }
  return HermiteEval{cur, prev, std::log(sum) + 2.0 * log_scale};
}

void check_quadrature_dim(std::size_t m) {
  if (m < 1 || m > kMaxQuadratureDim) throw Error("tensor quadrature infeasible");
}

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) r *= base;
  return r;
}

// Nodes (as columns) and weights of the dim-fold tensor product rule, in
// lexicographic order with the first coordinate varying slowest.
struct TensorRule {
  Matrix nodes;
  Vector weights;
};

TensorRule tensor_rule(const GaussHermiteRule& rule, std::size_t dim) {
  const std::size_t q = rule.order();
  const std::size_t count = ipow(q, dim);
  TensorRule out{Matrix(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count)),
                 Vector(static_cast<Eigen::Index>(count))};
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t k = 0; k < count; ++k) {
    double w = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      out.nodes(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) = rule.nodes(static_cast<Eigen::Index>(idx[d]));
      w *= rule.weights(static_cast<Eigen::Index>(idx[d]));
    }
    out.weights(static_cast<Eigen::Index>(k)) = w;
    for (std::size_t d = dim; d-- > 0;) {
      if (++idx[d] < q) break;
      idx[d] = 0;
    }
  }
  return out;
}

// E_z[f(base + V z)] with the inner offsets V z_k precomputed.
class SliceAverager {
 public:
  SliceAverager(const Matrix& v, const GaussHermiteRule& inner) {
    const TensorRule t = tensor_rule(inner, static_cast<std::size_t>(v.cols()));
    offsets_ = v * t.nodes;
    weights_ = t.weights;
    point_.resize(v.rows());
  }

  double operator()(const TestFunction& f, const Vector& base) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < offsets_.cols(); ++k) {
      point_ = base + offsets_.col(k);
      acc += weights_(k) * f(point_);
    }
    return acc;
  }

 private:
  Matrix offsets_;
  Vector weights_;
  Vector point_;
};

}  // namespace

GaussHermiteRule gauss_hermite(std::size_t q) {
  if (q < 1) throw Error("gauss_hermite: order must be positive");
  const auto n = static_cast<Eigen::Index>(q);
  Vector nodes = Vector::Zero(n);
  if (q > 1) {
    // Golub-Welsch on the symmetric Jacobi matrix of the monic recurrence
    // He_{k+1} = x He_k - k He_{k-1}.
    Vector diag = Vector::Zero(n);
    Vector sub(n - 1);
    for (Eigen::Index k = 0; k < n - 1; ++k) sub(k) = std::sqrt(static_cast<double>(k + 1));
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("gauss_hermite: eigensolver failed");
    nodes = solver.eigenvalues();
    // Newton polish: p_q'(x) = sqrt(q) p_{q-1}(x) for the orthonormal family.
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int it = 0; it < 3; ++it) {
        const HermiteEval e = hermite_eval(q, nodes(i));
        if (e.p_qm1 == 0.0) break;
        nodes(i) -= e.p_q / (std::sqrt(static_cast<double>(q)) * e.p_qm1);
      }
    }
  }
  Vector weights(n);
  for (Eigen::Index i = 0; i < n; ++i) weights(i) = std::exp(-hermite_eval(q, nodes(i)).log_christoffel);

  // Enforce exact symmetry about zero.
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    const Eigen::Index j = n - 1 - i;
    const double x = 0.5 * (nodes(j) - nodes(i));
    const double w = 0.5 * (weights(i) + weights(j));
    nodes(i) = -x;
    nodes(j) = x;
    weights(i) = weights(j) = w;
  }
  if (n % 2 == 1) nodes(n / 2) = 0.0;
  weights /= weights.sum();
  return GaussHermiteRule{std::move(nodes), std::move(weights)};
}

Vector TestFunction::values(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != dim) throw Error(name + ": dimension mismatch");
  Vector out(x.rows());
  Vector row(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    row = x.row(i).transpose();
    out(i) = value(row);
  }
  return out;
}

Matrix TestFunction::gradients(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != dim) throw Error(name + ": dimension mismatch");
  Matrix out(x.rows(), x.cols());
  Vector row(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    row = x.row(i).transpose();
    out.row(i) = gradient(row).transpose();
  }
  return out;
}

TestFunction bivariate() {
  TestFunction f;
  f.name = "bivariate";
  f.dim = 2;
  f.value = [](const Eigen::Ref<const Vector>& x) { return 5.0 * x(0) + std::sin(10.0 * kPi * x(1)); };
  f.gradient = [](const Eigen::Ref<const Vector>& x) {
    Vector g(2);
    g << 5.0, 10.0 * kPi * std::cos(10.0 * kPi * x(1));
    return g;
  };
  return f;
}

TestFunction quadratic(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() < 1) throw Error("quadratic: shape mismatch");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    throw Error("quadratic: A must be symmetric");
  }
  TestFunction f;
  f.name = "quadratic";
  f.dim = static_cast<std::size_t>(a.rows());
  f.value = [a, b](const Eigen::Ref<const Vector>& x) { return 0.5 * x.dot(a * x) + b.dot(x); };
  f.gradient = [a, b](const Eigen::Ref<const Vector>& x) -> Vector { return a * x + b; };
  return f;
}

Matrix quadratic_C(const Matrix& a, const Vector& b) {
  return a * a + b * b.transpose();
}

TestFunction exact_ridge(const Frame& u, const PolyModel& g) {
  if (u.dim() != g.vars()) throw Error("exact_ridge: profile and frame disagree on n");
  TestFunction f;
  f.name = "exact_ridge";
  f.dim = u.ambient_dim();
  const Matrix basis = u.matrix();
  f.value = [basis, g](const Eigen::Ref<const Vector>& x) {
    const Matrix y = (basis.transpose() * x).transpose();
    return g.evaluate(y)(0);
  };
  f.gradient = [basis, g](const Eigen::Ref<const Vector>& x) -> Vector {
    const Matrix y = (basis.transpose() * x).transpose();
    return basis * g.gradient(y).row(0).transpose();
  };
  return f;
}

TestFunction padded(const TestFunction& inner, const std::vector<std::size_t>& ignored) {
  const std::size_t m = inner.dim + ignored.size();
  std::vector<bool> skip(m, false);
  for (std::size_t i : ignored) {
    if (i >= m || skip[i]) throw Error("padded: invalid ignored coordinate list");
    skip[i] = true;
  }
  std::vector<Eigen::Index> active;
  for (std::size_t i = 0; i < m; ++i) {
    if (!skip[i]) active.push_back(static_cast<Eigen::Index>(i));
  }

  TestFunction f;
  f.name = "padded(" + inner.name + ")";
  f.dim = m;
  f.value = [inner, active](const Eigen::Ref<const Vector>& x) {
    Vector sub(static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) sub(static_cast<Eigen::Index>(k)) = x(active[k]);
    return inner.value(sub);
  };
  f.gradient = [inner, active, m](const Eigen::Ref<const Vector>& x) -> Vector {
    Vector sub(static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) sub(static_cast<Eigen::Index>(k)) = x(active[k]);
    const Vector g_sub = inner.gradient(sub);
    Vector g = Vector::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < active.size(); ++k) g(active[k]) = g_sub(static_cast<Eigen::Index>(k));
    return g;
  };
  return f;
}

Frame exact_ridge_frame(std::size_t m, std::size_t n, std::uint64_t seed) {
  return random_frame(m, n, seed);
}

PolyModel exact_ridge_profile(std::size_t n) {
  MultiIndexBasis basis = multi_indices(n, 3);
  Vector theta(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = 1.0 / static_cast<double>(k + 1);
  return PolyModel{std::move(basis), std::move(theta), Vector::Ones(static_cast<Eigen::Index>(n))};
}

namespace {

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v)) throw Error(std::string("builtin: invalid ") + what);
  return static_cast<std::size_t>(v);
}

}  // namespace

TestFunction builtin(std::string_view name, const std::vector<double>& params) {
  if (name == "bivariate") {
    if (!params.empty()) throw Error("builtin bivariate takes no parameters");
    return bivariate();
  }
  if (name == "quadratic") {
    if (params.empty()) throw Error("builtin quadratic needs the diagonal of A");
    const Vector diag = Eigen::Map<const Vector>(params.data(), static_cast<Eigen::Index>(params.size()));
    return quadratic(diag.asDiagonal().toDenseMatrix(), Vector::Zero(diag.size()));
  }
  if (name == "sphere") {
    if (params.size() != 1) throw Error("builtin sphere needs m");
    const auto m = static_cast<Eigen::Index>(as_count(params[0], "dimension"));
    return quadratic(Matrix::Identity(m, m), Vector::Zero(m));
  }
  if (name == "exact_ridge") {
    if (params.size() != 3) throw Error("builtin exact_ridge needs m,n,seed");
    const std::size_t m = as_count(params[0], "dimension");
    const std::size_t n = as_count(params[1], "ridge dimension");
    if (params[2] < 0.0 || params[2] != std::floor(params[2])) throw Error("builtin: invalid seed");
    const auto seed = static_cast<std::uint64_t>(params[2]);
    return exact_ridge(exact_ridge_frame(m, n, seed), exact_ridge_profile(n));
  }
  if (name == "padded") {
    if (params.size() != 1) throw Error("builtin padded needs the number of ignored coordinates");
    const std::size_t k = as_count(params[0], "padding");
    std::vector<std::size_t> ignored(k);
    for (std::size_t i = 0; i < k; ++i) ignored[i] = 2 + i;
    return padded(bivariate(), ignored);
  }
  throw Error("unknown builtin function: " + std::string(name));
}

double conditional_mean_mu(const TestFunction& f, const Frame& u, const Vector& y, const GaussHermiteRule& inner,
                           Density density) {
  if (density != Density::standard_gaussian) throw Error("unsupported density");
  if (u.ambient_dim() != f.dim) throw Error("conditional_mean_mu: dimension mismatch");
  if (static_cast<std::size_t>(y.size()) != u.dim()) throw Error("conditional_mean_mu: y has the wrong length");
  check_quadrature_dim(u.ambient_dim() - u.dim());
  const Matrix v = complement_basis(u.matrix());
  SliceAverager average(v, inner);
  const Vector base = u.matrix() * y;
  return average(f, base);
}

double ridge_error_complement(const TestFunction& f, const Matrix& v, const GaussHermiteRule& outer,
                              const GaussHermiteRule& inner) {
  const auto m = static_cast<std::size_t>(v.rows());
  if (m != f.dim) throw Error("ridge_error: dimension mismatch");
  check_quadrature_dim(m);
  if (v.cols() < 1 || static_cast<std::size_t>(v.cols()) >= m) throw Error("ridge_error: invalid complement");

  const Matrix projector = Matrix::Identity(v.rows(), v.rows()) - v * v.transpose();
  SliceAverager average(v, inner);

  const std::size_t q = outer.order();
  const std::size_t count = ipow(q, m);
  std::vector<std::size_t> idx(m, 0);
  Vector x(v.rows());
  Vector base(v.rows());
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    double w = 1.0;
    for (std::size_t d = 0; d < m; ++d) {
      x(static_cast<Eigen::Index>(d)) = outer.nodes(static_cast<Eigen::Index>(idx[d]));
      w *= outer.weights(static_cast<Eigen::Index>(idx[d]));
    }
    base.noalias() = projector * x;
    const double diff = f(x) - average(f, base);
    acc += w * diff * diff;
    for (std::size_t d = m; d-- > 0;) {
      if (++idx[d] < q) break;
      idx[d] = 0;
    }
  }
  return 0.5 * acc;
}

double ridge_error_R(const TestFunction& f, const Frame& u, const GaussHermiteRule& outer,
                     const GaussHermiteRule& inner) {
  if (u.ambient_dim() != f.dim) throw Error("ridge_error_R: dimension mismatch");
  check_quadrature_dim(f.dim);
  return ridge_error_complement(f, complement_basis(u.matrix()), outer, inner);
}

SpectrumEstimate estimate_C_quadrature(const TestFunction& f, const GaussHermiteRule& rule) {
  check_quadrature_dim(f.dim);
  const TensorRule t = tensor_rule(rule, f.dim);
  const auto m = static_cast<Eigen::Index>(f.dim);
  Matrix c = Matrix::Zero(m, m);
  Vector x(m);
  for (Eigen::Index k = 0; k < t.nodes.cols(); ++k) {
    x = t.nodes.col(k);
    const Vector g = f.gradient(x);
    c.noalias() += t.weights(k) * g * g.transpose();
  }
  return spectrum_of(c, static_cast<std::size_t>(t.nodes.cols()));
}

SweepTable sweep_angle(const TestFunction& f, std::size_t angles, std::size_t outer_q, std::size_t inner_q) {
  if (f.dim != 2) throw Error("sweep_angle: function must be bivariate");
  if (angles < 2 || outer_q < 1 || inner_q < 1) throw Error("sweep_angle: parameters must be positive (angles >= 2)");
  const GaussHermiteRule outer = gauss_hermite(outer_q);
  const GaussHermiteRule inner = gauss_hermite(inner_q);

  SweepTable table(angles);
  auto row = [&](std::size_t i) {
    const double alpha = kPi * static_cast<double>(i) / static_cast<double>(angles - 1);
    // Complement of [cos a, sin a]^T.
    Matrix v(2, 1);
    v << -std::sin(alpha), std::cos(alpha);
    table[i] = SweepRow{alpha, ridge_error_complement(f, v, outer, inner)};
  };

  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, angles);
  if (workers == 1) {
    for (std::size_t i = 0; i < angles; ++i) row(i);
    return table;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < angles; i += workers) row(i);
    });
  }
  for (auto& t : pool) t.join();
  return table;
}

GrassmannGradient grassmann_grad_R_fd(const TestFunction& f, const Frame& v, double step,
                                      const GaussHermiteRule& outer, const GaussHermiteRule& inner) {
  if (!(step > 0.0)) throw Error("grassmann_grad_R_fd: step must be positive");
  if (v.ambient_dim() != f.dim) throw Error("grassmann_grad_R_fd: dimension mismatch");
  const Matrix& vm = v.matrix();
  const Matrix u = complement_basis(vm);
  GrassmannGradient out{Matrix::Zero(vm.rows(), vm.cols()), 0.0};
  double sq = 0.0;
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    for (Eigen::Index j = 0; j < vm.cols(); ++j) {
      Matrix t = Matrix::Zero(vm.rows(), vm.cols());
      t.col(j) = u.col(i);
      const double rp = ridge_error_complement(f, polar_factor(vm + step * t), outer, inner);
      const double rm = ridge_error_complement(f, polar_factor(vm - step * t), outer, inner);
      const double d = (rp - rm) / (2.0 * step);
      out.tangent += d * t;
      sq += d * d;
    }
  }
  out.norm = std::sqrt(sq);
  return out;
}

double near_stationary_bound(double lipschitz, std::size_t m, std::size_t n, const std::vector<double>& tail) {
  if (!(lipschitz > 0.0)) throw Error("near_stationary_bound: L must be positive");
  if (n >= m) throw Error("near_stationary_bound: need n < m");
  double sum = 0.0;
  for (double t : tail) {
    if (t < 0.0) throw Error("near_stationary_bound: negative tail eigenvalue");
    sum += t;
  }
  return lipschitz * (2.0 * std::sqrt(static_cast<double>(m)) + std::sqrt(static_cast<double>(m - n))) *
         std::sqrt(sum);
}

double lipschitz_estimate(const GradientSet& gradients) {
  return gradients.rows().rowwise().norm().maxCoeff();
}

}  // namespace ridgekit
