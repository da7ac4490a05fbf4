#include "ridgekit/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

namespace ridgekit {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error("Rng::below: bound must be positive");
  // Reject the partial top bucket to keep the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed ^ (stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Design Design::head(std::size_t rows) const {
  if (rows > count()) throw Error("Design::head: requested more rows than available");
  return Design{points.topRows(static_cast<Eigen::Index>(rows)), domain, seed};
}

namespace {

void check_shape(std::size_t count, std::size_t dim) {
  if (count == 0) throw Error("design needs at least one point");
  if (dim == 0) throw Error("design needs at least one dimension");
}

}  // namespace

Design latin_hypercube(std::size_t count, std::size_t dim, std::uint64_t seed) {
  check_shape(count, dim);
  Rng rng(seed);
  const auto rows = static_cast<Eigen::Index>(count);
  const auto cols = static_cast<Eigen::Index>(dim);
  Matrix points(rows, cols);
  std::vector<std::size_t> strata(count);
  const double width = static_cast<double>(count);

  for (Eigen::Index j = 0; j < cols; ++j) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    for (std::size_t i = count; i > 1; --i) {
      std::swap(strata[i - 1], strata[rng.below(i)]);
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double stratum = static_cast<double>(strata[static_cast<std::size_t>(i)]);
      double x = (stratum + rng.uniform()) / width;
      // Rounding may land exactly on the upper stratum edge.
      while (std::floor(x * width) > stratum) x = std::nextafter(x, 0.0);
      points(i, j) = x;
    }
  }
  return Design{std::move(points), Domain{DomainKind::unit_cube, {}, {}}, seed};
}

Design uniform_design(std::size_t count, std::size_t dim, std::uint64_t seed) {
  check_shape(count, dim);
  Rng rng(seed);
  Matrix points(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) points(i, j) = rng.uniform();
  }
  return Design{std::move(points), Domain{DomainKind::unit_cube, {}, {}}, seed};
}

Design gaussian_design(std::size_t count, std::size_t dim, std::uint64_t seed) {
  check_shape(count, dim);
  Rng rng(seed);
  Matrix points(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) points(i, j) = rng.normal();
  }
  return Design{std::move(points), Domain{DomainKind::standard_gaussian, {}, {}}, seed};
}

Design scale_to_box(const Design& unit, const Vector& lo, const Vector& hi) {
  if (unit.domain.kind != DomainKind::unit_cube) throw Error("scale_to_box expects a unit-cube design");
  const auto m = unit.points.cols();
  if (lo.size() != m || hi.size() != m) throw Error("scale_to_box: bound length must equal dimension");
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(lo(j) < hi(j))) throw Error("scale_to_box: lo must be < hi in every coordinate");
  }
  Matrix points = unit.points;
  const Vector width = hi - lo;
  for (Eigen::Index j = 0; j < m; ++j) {
    points.col(j) = (lo(j) + points.col(j).array() * width(j)).min(hi(j)).matrix();
  }
  return Design{std::move(points), Domain{DomainKind::box, lo, hi}, unit.seed};
}

}  // namespace ridgekit
