#pragma once

// Monte Carlo estimation of C = E[grad f grad f^T], spectral partitioning and
// bootstrap variability of the estimated eigenpairs.

#include "ridgekit/linalg.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ridgekit {

/// M x m matrix of sampled gradients, one row per sample.
class GradientSet {
 public:
  explicit GradientSet(Matrix rows);

  const Matrix& rows() const noexcept { return rows_; }
  std::size_t count() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rows_.cols()); }

  /// First `count` rows (the "first N samples" subsets of a larger design).
  GradientSet head(std::size_t count) const;

 private:
  Matrix rows_;
};

struct SpectrumEstimate {
  Spectrum spectrum;
  std::size_t sample_count = 0;
  Matrix c_hat;
};

struct Range {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct BootstrapSummary {
  std::vector<Range> eigenvalues;        // one per index 1..m
  std::vector<Range> subspace_distance;  // one per k = 1..m-1
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
};

struct ErrorMetrics {
  double eigenvalue_error = 0.0;  // mean relative eigenvalue error
  double subspace_error = 0.0;    // mean leading-k subspace distance, k = 1..m-1
};

inline constexpr std::size_t kDefaultBootstrapReplicates = 100;
/// Smallest consecutive eigenvalue ratio that counts as a spectral gap.
inline constexpr double kMinGapRatio = 1.1;

/// C_hat = (1/M) sum g g^T, symmetrized and eigendecomposed.
SpectrumEstimate estimate_C(const GradientSet& gradients);

/// Wraps an explicitly supplied C (analytic or quadrature) as an estimate.
SpectrumEstimate spectrum_of(const Matrix& c, std::size_t sample_count);

/// Index n <= max_n maximizing log(lambda_n / lambda_{n+1}); eigenvalues at or
/// below 1e-14 * lambda_1 are floored to that value. Throws
/// Error("no spectral gap") when every considered ratio is <= kMinGapRatio.
std::size_t choose_n(const Spectrum& spectrum, std::size_t max_n);

/// Resamples rows with replacement B times. Replicate b draws from its own
/// stream derive_seed(seed, b), so the summary is independent of evaluation
/// order.
BootstrapSummary bootstrap_spectrum(const GradientSet& gradients, std::size_t replicates,
                                    std::uint64_t seed);

/// Mean relative eigenvalue error and mean subspace distance over k = 1..m-1.
ErrorMetrics error_metrics(const SpectrumEstimate& reference, const SpectrumEstimate& estimate);

}  // namespace ridgekit
