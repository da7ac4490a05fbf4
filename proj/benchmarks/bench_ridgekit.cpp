#include "ridgekit/active_subspace.hpp"
#include "ridgekit/oracle.hpp"
#include "ridgekit/polyridge.hpp"
#include "ridgekit/sampling.hpp"

#include <benchmark/benchmark.h>


using namespace ridgekit;

static void BM_GaussHermite(benchmark::State& state) {
  const auto q = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_hermite(q));
}
BENCHMARK(BM_GaussHermite)->Arg(11)->Arg(101)->Arg(301);

static void BM_RidgeErrorR(benchmark::State& state) {
  const GaussHermiteRule rule = gauss_hermite(static_cast<std::size_t>(state.range(0)));
  Matrix u(2, 1);
  u << std::cos(0.3), std::sin(0.3);
  const Frame frame = Frame::from_orthonormal(u);
  const TestFunction f = bivariate();
  for (auto _ : state) benchmark::DoNotOptimize(ridge_error_R(f, frame, rule, rule));
}
BENCHMARK(BM_RidgeErrorR)->Arg(51)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

static void BM_EstimateC(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const TestFunction f = builtin("exact_ridge", {static_cast<double>(m), 2.0, 1.0});
  const GradientSet g(f.gradients(gaussian_design(1000, m, 3).points));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_C(g));
}
BENCHMARK(BM_EstimateC)->Arg(4)->Arg(18)->Arg(50);

static void BM_Bootstrap(benchmark::State& state) {
  const TestFunction f = builtin("exact_ridge", {18.0, 2.0, 1.0});
  const GradientSet g(f.gradients(gaussian_design(1000, 18, 3).points));
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_spectrum(g, 100, 7));
}
BENCHMARK(BM_Bootstrap)->Unit(benchmark::kMillisecond);

static void BM_AlternateFit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto degree = static_cast<std::size_t>(state.range(1));
  const TestFunction f = builtin("exact_ridge", {18.0, 2.0, 5.0});
  const Matrix x = gaussian_design(1000, 18, 6).points;
  const LabeledSamples s{x, f.values(x)};
  const Frame u0 = random_frame(18, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(alternate_fit(s, n, degree, u0, kDefaultIterations));
}
BENCHMARK(BM_AlternateFit)->Args({1, 3})->Args({2, 3})->Args({3, 3})->Unit(benchmark::kMillisecond);

static void BM_LatinHypercube(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(latin_hypercube(static_cast<std::size_t>(state.range(0)), 18, 1));
}
BENCHMARK(BM_LatinHypercube)->Arg(1000)->Arg(20000);

BENCHMARK_MAIN();
