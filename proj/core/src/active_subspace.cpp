#include "ridgekit/active_subspace.hpp"

#include "ridgekit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ridgekit {

GradientSet::GradientSet(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1) throw Error("gradient set must be nonempty");
  if (!rows_.allFinite()) throw Error("gradient set contains non-finite entries");
}

GradientSet GradientSet::head(std::size_t count) const {
  if (count < 1 || count > this->count()) throw Error("GradientSet::head: invalid row count");
  return GradientSet(rows_.topRows(static_cast<Eigen::Index>(count)));
}

SpectrumEstimate spectrum_of(const Matrix& c, std::size_t sample_count) {
  const Matrix sym = 0.5 * (c + c.transpose());
  return SpectrumEstimate{sym_eig_desc(sym), sample_count, sym};
}

SpectrumEstimate estimate_C(const GradientSet& gradients) {
  const Matrix& g = gradients.rows();
  const Matrix c = (g.transpose() * g) / static_cast<double>(g.rows());
  return spectrum_of(c, gradients.count());
}

std::size_t choose_n(const Spectrum& spectrum, std::size_t max_n) {
  const std::size_t m = spectrum.size();
  if (m < 2) throw Error("no spectral gap");
  const std::size_t limit = std::min(max_n, m - 1);
  if (limit < 1) throw Error("choose_n: max_n must be at least 1");

  const double lead = spectrum.eigenvalues(0);
  if (!(lead > 0.0)) throw Error("no spectral gap");
  const double floor = 1e-14 * lead;
  auto at = [&](std::size_t k) { return std::max(spectrum.eigenvalues(static_cast<Eigen::Index>(k)), floor); };

  std::size_t best = 0;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < limit; ++k) {
    const double gap = std::log(at(k) / at(k + 1));
    if (gap > best_gap) {
      best_gap = gap;
      best = k + 1;
    }
  }
  if (best_gap <= std::log(kMinGapRatio)) throw Error("no spectral gap");
  return best;
}

BootstrapSummary bootstrap_spectrum(const GradientSet& gradients, std::size_t replicates,
                                    std::uint64_t seed) {
  if (replicates < 1) throw Error("bootstrap needs at least one replicate");
  const SpectrumEstimate point = estimate_C(gradients);
  const Matrix& g = gradients.rows();
  const Eigen::Index rows = g.rows();
  const Eigen::Index m = g.cols();

  BootstrapSummary summary;
  summary.replicates = replicates;
  summary.seed = seed;
  const double inf = std::numeric_limits<double>::infinity();
  summary.eigenvalues.assign(static_cast<std::size_t>(m), Range{inf, 0.0, -inf});
  summary.subspace_distance.assign(static_cast<std::size_t>(m - 1), Range{inf, 0.0, -inf});

  auto accumulate = [](Range& r, double v) {
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
    r.mean += v;
  };

  Matrix resampled(rows, m);
  for (std::size_t b = 0; b < replicates; ++b) {
    Rng rng(derive_seed(seed, b));
    for (Eigen::Index i = 0; i < rows; ++i) {
      resampled.row(i) = g.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(rows))));
    }
    const SpectrumEstimate replicate = estimate_C(GradientSet(resampled));
    for (Eigen::Index k = 0; k < m; ++k) {
      accumulate(summary.eigenvalues[static_cast<std::size_t>(k)], replicate.spectrum.eigenvalues(k));
    }
    for (Eigen::Index k = 1; k < m; ++k) {
      const double d = subspace_distance(point.spectrum.eigenvectors.leftCols(k),
                                         replicate.spectrum.eigenvectors.leftCols(k));
      accumulate(summary.subspace_distance[static_cast<std::size_t>(k - 1)], d);
    }
  }

  const double scale = 1.0 / static_cast<double>(replicates);
  for (auto* ranges : {&summary.eigenvalues, &summary.subspace_distance}) {
    for (Range& r : *ranges) {
      r.mean *= scale;
      // The running mean can drift outside [min, max] by an ulp.
      r.mean = std::clamp(r.mean, r.min, r.max);
    }
  }
  return summary;
}

ErrorMetrics error_metrics(const SpectrumEstimate& reference, const SpectrumEstimate& estimate) {
  const Spectrum& ref = reference.spectrum;
  const Spectrum& est = estimate.spectrum;
  if (ref.size() != est.size()) throw Error("error_metrics: dimension mismatch");
  const auto m = static_cast<Eigen::Index>(ref.size());
  if (m < 2) throw Error("error_metrics: need m >= 2");

  ErrorMetrics out;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double lref = ref.eigenvalues(k);
    if (lref == 0.0) throw Error("error_metrics: zero reference eigenvalue");
    out.eigenvalue_error += std::abs(lref - est.eigenvalues(k)) / std::abs(lref);
  }
  out.eigenvalue_error /= static_cast<double>(m);

  for (Eigen::Index k = 1; k < m; ++k) {
    out.subspace_error += subspace_distance(ref.eigenvectors.leftCols(k), est.eigenvectors.leftCols(k));
  }
  out.subspace_error /= static_cast<double>(m - 1);
  return out;
}

}  // namespace ridgekit
