// Serial reference kernels against their OpenMP counterparts.
// Arg(0) is the serial reference; Arg(w) runs with w workers.
#include <benchmark/benchmark.h>

#include <omp.h>

#include "indsum/core.hpp"
#include "indsum/ginibre.hpp"
#include "indsum/karlin.hpp"

using namespace indsum;

namespace {

void worker_args(benchmark::internal::Benchmark* b) {
  b->Arg(0);
  for (int w = 1; w <= omp_get_max_threads(); w *= 2) b->Arg(w);
  b->Unit(benchmark::kMillisecond);
}

void BM_ginibre_variance(benchmark::State& state) {
  const ginibre::GinibreModel g;
  const int w = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(w == 0 ? var_a_serial(g, 1e7) : var_a(g, 1e7, {}, w));
}
BENCHMARK(BM_ginibre_variance)->Apply(worker_args);

void BM_karlin_mean(benchmark::State& state) {
  const karlin::KarlinModel k(karlin::RhoSpec{karlin::PowerLaw{0.5}}, 2);
  const int w = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(w == 0 ? mean_b_serial(k, 1e9) : mean_b(k, 1e9, {}, w));
}
BENCHMARK(BM_karlin_mean)->Apply(worker_args);

void BM_det_cross_sum(benchmark::State& state) {
  const karlin::KarlinModel k(karlin::RhoSpec{karlin::PowerLaw{0.5}}, 2);
  const int w = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(w == 0 ? karlin::det_cross_sum_serial(k, 10000, 4000)
                                    : karlin::det_cross_sum(k, 10000, 4000, w));
}
BENCHMARK(BM_det_cross_sum)->Apply(worker_args);

void BM_sample_counts(benchmark::State& state) {
  const ginibre::GinibreModel g;
  const int w = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(w == 0 ? sample_counts_serial(g, 1e4, 2000, 1) : sample_counts(g, 1e4, 2000, 1, 1e-6, w));
}
BENCHMARK(BM_sample_counts)->Apply(worker_args);

}  // namespace

BENCHMARK_MAIN();
