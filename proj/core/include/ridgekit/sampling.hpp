#pragma once

// Seeded designs of experiments: Latin hypercube, uniform box and standard
// Gaussian. All randomness flows through Rng, whose bit stream is fixed by
// the std::mt19937_64 definition and our own distribution transforms, so a
// (seed, M, m) triple reproduces the same design on every platform.

#include "ridgekit/linalg.hpp"

#include <cstdint>
#include <random>

namespace ridgekit {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Derives an independent stream seed (splitmix64 finalizer of seed ^ stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum class DomainKind { unit_cube, box, standard_gaussian };

struct Domain {
  DomainKind kind = DomainKind::unit_cube;
  Vector lo;  // box bounds; empty unless kind == box
  Vector hi;
};

struct Design {
  Matrix points;  // M x m
  Domain domain;
  std::uint64_t seed = 0;

  std::size_t count() const noexcept { return static_cast<std::size_t>(points.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points.cols()); }

  /// First `rows` points, no re-stratification: a prefix of a Latin
  /// hypercube design is in general no longer Latin.
  Design head(std::size_t rows) const;
};

Design latin_hypercube(std::size_t count, std::size_t dim, std::uint64_t seed);
Design uniform_design(std::size_t count, std::size_t dim, std::uint64_t seed);
Design gaussian_design(std::size_t count, std::size_t dim, std::uint64_t seed);

/// Affine map x -> lo + x (hi - lo) of a unit-cube design onto a box.
Design scale_to_box(const Design& unit, const Vector& lo, const Vector& hi);

}  // namespace ridgekit
