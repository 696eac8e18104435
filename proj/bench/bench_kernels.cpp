// Serial reference kernels against their OpenMP versions.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "pdthresh/kernels.hpp"

using namespace pdthresh;

namespace {

std::vector<double> grid(int count) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = -1.0 + 2.0 * i / (count - 1);
  return t;
}

GegenbauerSeries decaying_series(int n, int degree) {
  std::vector<double> a(degree + 1);
  double total = 0.0;
  for (int k = 0; k <= degree; ++k) total += a[k] = 1.0 / ((k + 1.0) * (k + 1.0));
  for (double& v : a) v /= total;
  return GegenbauerSeries(SphereContext(n), std::move(a));
}

template <bool Parallel>
void BM_gegenbauer_table(benchmark::State& state) {
  const SphereContext ctx(5);
  const auto nodes = grid(static_cast<int>(state.range(0)));
  const int max_k = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto t = Parallel ? gegenbauer_table(ctx, nodes, max_k) : gegenbauer_table_serial(ctx, nodes, max_k);
    benchmark::DoNotOptimize(t.data().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(1) + 1));
}

template <bool Parallel>
void BM_eval_series_batch(benchmark::State& state) {
  const auto f = decaying_series(5, 1024);
  const auto pts = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto v = Parallel ? eval_series_batch(f, pts) : eval_series_batch_serial(f, pts);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_map_entries(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto g = random_gram(SphereContext(6), dim, 1);
  const auto f = decaying_series(6, 256);
  for (auto _ : state) {
    auto m = Parallel ? map_entries(f, g.base()) : map_entries_serial(f, g.base());
    benchmark::DoNotOptimize(m.data().data());
  }
  state.SetItemsProcessed(state.iterations() * dim * (dim + 1) / 2);
}

template <bool Parallel>
void BM_gram_matrix(benchmark::State& state) {
  const auto pts = random_unit_vectors(SphereContext(32), static_cast<int>(state.range(0)), 9);
  for (auto _ : state) {
    auto g = Parallel ? gram_matrix(pts) : gram_matrix_serial(pts);
    benchmark::DoNotOptimize(g.matrix().data().data());
  }
}

}  // namespace

BENCHMARK(BM_gegenbauer_table<false>)->Args({2049, 1024})->Args({8193, 4096})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gegenbauer_table<true>)->Args({2049, 1024})->Args({8193, 4096})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_eval_series_batch<false>)->Arg(2049)->Arg(65536)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_eval_series_batch<true>)->Arg(2049)->Arg(65536)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_map_entries<false>)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_map_entries<true>)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram_matrix<false>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram_matrix<true>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
