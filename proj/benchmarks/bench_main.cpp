#include <benchmark/benchmark.h>

#include "robustl1/analytics.hpp"
#include "robustl1/certificates.hpp"
#include "robustl1/problems.hpp"
#include "robustl1/random.hpp"
#include "robustl1/solvers.hpp"

using namespace robustl1;

namespace {

Problem corrupted(std::size_t m, std::size_t n, double eta, std::uint64_t seed) {
  CorruptionSpec spec;
  spec.eta = Fraction(eta);
  spec.kind = CorruptionKind::kTopkZeroing;
  return assemble_problem(sample_gaussian_design(m, n, seed),
                          sample_sparse_signal(n, n, 1.0, seed), spec, Vector(m, 0.0), seed);
}

void BM_L1Regress(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const Problem p = corrupted(m, n, 0.15, 1);
  std::size_t iterations = 0;
  for (auto _ : state) {
    const SolverResult r = l1_regress(p.x, p.y);
    iterations += r.iterations;
    benchmark::DoNotOptimize(r.objective);
  }
  state.counters["admm_iters"] =
      benchmark::Counter(static_cast<double>(iterations), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_L1Regress)->Args({1000, 1})->Args({2000, 10})->Args({2000, 50})
    ->Unit(benchmark::kMillisecond);

void BM_L1ConstrainedSparse(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  CorruptionSpec spec;
  spec.eta = Fraction(0.15);
  spec.kind = CorruptionKind::kTopkZeroing;
  const Problem p = assemble_problem(sample_gaussian_design(m, 512, 2),
                                     sample_sparse_signal(512, 8, 1.0, 2), spec, Vector(m, 0.0), 2);
  const double lambda = l1_norm(p.w_star);
  SolverOptions opts;
  opts.max_iterations = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(l1_regress_constrained(p.x, p.y, lambda, opts));
}
BENCHMARK(BM_L1ConstrainedSparse)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_ProjectL1Ball(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  const CounterRng rng(3, 1);
  Vector v(len);
  for (std::size_t i = 0; i < len; ++i) v[i] = rng.normal(i);
  const double lambda = 0.1 * l1_norm(v);
  for (auto _ : state) benchmark::DoNotOptimize(project_l1_ball(v, lambda));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * len));
}
BENCHMARK(BM_ProjectL1Ball)->Range(64, 1 << 16);

void BM_SoftThreshold(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  const CounterRng rng(4, 1);
  Vector v(len);
  for (std::size_t i = 0; i < len; ++i) v[i] = rng.normal(i);
  for (auto _ : state) benchmark::DoNotOptimize(soft_threshold(v, 0.5));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * len));
}
BENCHMARK(BM_SoftThreshold)->Range(64, 1 << 16);

void BM_BreakdownThreshold(benchmark::State& state) {
  const double p = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(breakdown_threshold(p));
}
BENCHMARK(BM_BreakdownThreshold)->DenseRange(1, 10, 3);

void BM_NormalQuantile(benchmark::State& state) {
  double p = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(std_normal_quantile(p));
    p = p < 0.999 ? p + 1e-3 : 1e-6;
  }
}
BENCHMARK(BM_NormalQuantile);

void BM_DirectionGap(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const DenseMatrix x = sample_gaussian_design(m, 10, 5);
  const Vector v = sample_sparse_signal(10, 3, 1.0, 5);
  for (auto _ : state) benchmark::DoNotOptimize(direction_gap(x, v, Fraction(0.1)));
}
BENCHMARK(BM_DirectionGap)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
