#include "ridgekit/linalg.hpp"

#include "support/generators.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ridgekit;
using ridgekit::testing::max_abs;

TEST_CASE("orthonormalize keeps already-orthonormal input") {
  const Frame u = orthonormalize(Matrix::Identity(2, 2));
  CHECK(max_abs(u.matrix() - Matrix::Identity(2, 2)) == 0.0);
  const Frame tall = orthonormalize(Matrix::Identity(3, 2));
  CHECK(max_abs(tall.matrix() - Matrix::Identity(3, 2)) == 0.0);
}

TEST_CASE("orthonormalize by hand") {
  // Columns (1,0) and (1,1): Gram-Schmidt gives e1, e2.
  Matrix a(2, 2);
  a << 1, 1,
       0, 1;
  const Frame u = orthonormalize(a);
  CHECK(max_abs(u.matrix() - Matrix::Identity(2, 2)) <= 1e-15);
}

TEST_CASE("orthonormalize rejects rank-deficient input") {
  Matrix a(3, 2);
  a << 1, 2,
       2, 4,
       3, 6;
  CHECK_THROWS_WITH_AS(orthonormalize(a), "rank deficient", Error);
  CHECK_THROWS_AS(orthonormalize(Matrix::Zero(4, 2)), Error);
}

TEST_CASE("orthonormalize: random full-rank inputs give valid frames") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = static_cast<Eigen::Index>(2 + rng.below(20));
    const auto n = static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(m - 1)));
    const Matrix a = ridgekit::testing::gaussian_matrix(m, n, rng);
    const Frame u = orthonormalize(a);
    CHECK(orthonormality_defect(u.matrix()) <= 1e-12);
    CHECK(satisfies_sign_convention(u.matrix()));
    // Same span: A lies in span(U).
    CHECK(max_abs(a - u.matrix() * (u.matrix().transpose() * a)) <= 1e-12 * max_abs(a));
  }
}

TEST_CASE("Frame construction enforces invariants") {
  Matrix not_orthonormal(3, 1);
  not_orthonormal << 1, 1, 0;
  CHECK_THROWS_AS(Frame::from_orthonormal(not_orthonormal), Error);
  CHECK_THROWS_AS(Frame::from_orthonormal(Matrix::Zero(2, 0)), Error);
  CHECK_THROWS_AS(Frame::from_orthonormal(Matrix::Identity(2, 3)), Error);

  Matrix flipped(2, 1);
  flipped << 0, -1;
  const Frame u = Frame::from_orthonormal(flipped);
  CHECK(u.matrix()(1, 0) == 1.0);
}

TEST_CASE("complement") {
  SUBCASE("e1 in R^2") {
    const Frame v = complement(Frame::identity(2, 1));
    CHECK(std::abs(v.matrix()(0, 0)) <= 1e-15);
    CHECK(v.matrix()(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("rotated line") {
    const double alpha = 0.7;
    Matrix u(2, 1);
    u << std::cos(alpha), std::sin(alpha);
    const Frame v = complement(Frame::from_orthonormal(u));
    // span(-sin, cos) up to sign.
    CHECK(std::abs(std::abs(v.matrix()(0, 0)) - std::sin(alpha)) <= 1e-14);
    CHECK(std::abs(std::abs(v.matrix()(1, 0)) - std::cos(alpha)) <= 1e-14);
  }
  SUBCASE("random frames") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const auto m = static_cast<Eigen::Index>(2 + rng.below(15));
      const auto n = static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(m - 1)));
      const Frame u = orthonormalize(ridgekit::testing::gaussian_matrix(m, n, rng));
      const Frame v = complement(u);
      CHECK(v.dim() == static_cast<std::size_t>(m - n));
      CHECK(max_abs(v.matrix().transpose() * u.matrix()) <= 1e-12);
      Matrix full(m, m);
      full << u.matrix(), v.matrix();
      CHECK(orthonormality_defect(full) <= 1e-12);
    }
  }
}

TEST_CASE("complement of a full basis is an error") {
  CHECK_THROWS_WITH_AS(complement(Frame::identity(3, 3)), "no complement", Error);
  CHECK_THROWS_WITH_AS(complement_basis(Matrix::Identity(3, 3)), "no complement", Error);
}

TEST_CASE("sym_eig_desc examples") {
  SUBCASE("diagonal from the bivariate example") {
    Matrix s(2, 2);
    s << 25.00, 0,
         0, 526.4;
    const Spectrum sp = sym_eig_desc(s);
    CHECK(sp.eigenvalues(0) == doctest::Approx(526.4));
    CHECK(sp.eigenvalues(1) == doctest::Approx(25.0));
    Matrix w(2, 2);
    w << 0, 1,
         1, 0;
    CHECK(max_abs(sp.eigenvectors - w) <= 1e-15);
  }
  SUBCASE("identity keeps identity eigenvectors") {
    const Spectrum sp = sym_eig_desc(Matrix::Identity(4, 4));
    CHECK(max_abs(sp.eigenvalues - Vector::Ones(4)) <= 1e-15);
    CHECK(max_abs(sp.eigenvectors - Matrix::Identity(4, 4)) <= 1e-15);
  }
  SUBCASE("2x2 by characteristic polynomial") {
    // det([[2-l,1],[1,2-l]]) = (l-3)(l-1).
    Matrix s(2, 2);
    s << 2, 1,
         1, 2;
    const Spectrum sp = sym_eig_desc(s);
    CHECK(sp.eigenvalues(0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(sp.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-15));
    const double r = 1.0 / std::sqrt(2.0);
    Matrix w(2, 2);
    w << r, r,
         r, -r;
    CHECK(max_abs(sp.eigenvectors - w) <= 1e-14);
  }
}

TEST_CASE("sym_eig_desc rejects asymmetric input") {
  Matrix s(2, 2);
  s << 1, 2,
       0, 1;
  CHECK_THROWS_AS(sym_eig_desc(s), Error);
}

TEST_CASE("sym_eig_desc reconstruction on random symmetric matrices up to m = 50") {
  Rng rng(2024);
  for (Eigen::Index m : {1, 2, 3, 7, 18, 31, 50}) {
    const Matrix s = ridgekit::testing::random_symmetric(m, rng);
    const Spectrum sp = sym_eig_desc(s);
    const Matrix back = sp.eigenvectors * sp.eigenvalues.asDiagonal() * sp.eigenvectors.transpose();
    CHECK(max_abs(back - s) <= 1e-10 * max_abs(s));
    for (Eigen::Index k = 1; k < m; ++k) CHECK(sp.eigenvalues(k - 1) >= sp.eigenvalues(k));
    CHECK(satisfies_sign_convention(sp.eigenvectors));
    CHECK(orthonormality_defect(sp.eigenvectors) <= 1e-12);
  }
}

TEST_CASE("subspace_distance examples") {
  const Frame e1 = Frame::identity(2, 1);
  Matrix e2m(2, 1);
  e2m << 0, 1;
  const Frame e2 = Frame::from_orthonormal(e2m);
  CHECK(subspace_distance(e1, e1) == 0.0);
  CHECK(subspace_distance(e1, e2) == doctest::Approx(1.0).epsilon(1e-15));

  // Principal angle alpha between e1 and (cos a, sin a): distance |sin a|.
  for (double alpha : {std::numbers::pi / 6, 0.1, 1.2, 2.5}) {
    Matrix w(2, 1);
    w << std::cos(alpha), std::sin(alpha);
    CHECK(subspace_distance(e1, Frame::from_orthonormal(w)) ==
          doctest::Approx(std::abs(std::sin(alpha))).epsilon(1e-13));
  }
  Matrix w(2, 1);
  w << std::cos(std::numbers::pi / 6), std::sin(std::numbers::pi / 6);
  CHECK(subspace_distance(e1, Frame::from_orthonormal(w)) == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(subspace_distance(Frame::identity(3, 1), Frame::identity(3, 2)), Error);
}

TEST_CASE("subspace_distance is symmetric and basis invariant") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = static_cast<Eigen::Index>(3 + rng.below(15));
    const auto n = static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(m - 1)));
    const Frame a = orthonormalize(ridgekit::testing::gaussian_matrix(m, n, rng));
    const Frame b = orthonormalize(ridgekit::testing::gaussian_matrix(m, n, rng));
    const double dab = subspace_distance(a, b);
    CHECK(dab >= 0.0);
    CHECK(dab <= 1.0);
    CHECK(std::abs(dab - subspace_distance(b, a)) <= 1e-12);

    const Matrix q = ridgekit::testing::random_rotation(n, rng);
    const Frame aq = Frame::from_orthonormal(a.matrix() * q);
    CHECK(subspace_distance(a, aq) <= 1e-10);
  }
}

TEST_CASE("lstsq") {
  SUBCASE("identity") {
    const Vector b = (Vector(3) << 1.5, -2.0, 7.0).finished();
    CHECK(max_abs(lstsq(Matrix::Identity(3, 3), b) - b) <= 1e-15);
  }
  SUBCASE("two equations one unknown") {
    Matrix a(2, 1);
    a << 1, 1;
    const Vector theta = lstsq(a, (Vector(2) << 1, 3).finished());
    CHECK(theta(0) == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("consistent overdetermined system") {
    Rng rng(3);
    const Matrix a = ridgekit::testing::gaussian_matrix(40, 6, rng);
    const Vector truth = ridgekit::testing::gaussian_matrix(6, 1, rng);
    const Vector b = a * truth;
    CHECK((a * lstsq(a, b) - b).norm() <= 1e-10 * b.norm());
  }
  SUBCASE("rank deficient gives the minimum-norm solution") {
    Matrix a(3, 2);
    a << 1, 1,
         1, 1,
         1, 1;
    const Vector theta = lstsq(a, (Vector(3) << 2, 2, 2).finished());
    CHECK(theta(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(theta(1) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("polar_factor commutes with right rotation") {
  Rng rng(17);
  const Matrix a = ridgekit::testing::gaussian_matrix(9, 3, rng);
  const Matrix q = ridgekit::testing::random_rotation(3, rng);
  CHECK(max_abs(polar_factor(a * q) - polar_factor(a) * q) <= 1e-13);
  CHECK(orthonormality_defect(polar_factor(a)) <= 1e-13);
}
