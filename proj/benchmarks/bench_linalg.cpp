#include "lowrank/linalg.hpp"
#include "lowrank/problems.hpp"

#include <benchmark/benchmark.h>

namespace {

lowrank::Matrix noisy_low_rank(lowrank::Index n, lowrank::Index r) {
  lowrank::Rng rng(7);
  const lowrank::Matrix b = lowrank::gaussian_matrix(n, r, rng);
  const lowrank::Matrix c = lowrank::gaussian_matrix(n, r, rng);
  return b * c.transpose() + 0.1 * lowrank::gaussian_matrix(n, n, rng);
}

void BM_TruncatedProjection(benchmark::State& state) {
  const auto n = static_cast<lowrank::Index>(state.range(0));
  const auto r = static_cast<lowrank::Index>(state.range(1));
  const lowrank::Matrix z = noisy_low_rank(n, r);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lowrank::truncated_svd_project(z, r));
  }
}
BENCHMARK(BM_TruncatedProjection)
    ->Args({100, 10})
    ->Args({200, 5})
    ->Args({500, 10})
    ->Unit(benchmark::kMillisecond);

void BM_FullSvd(benchmark::State& state) {
  const auto n = static_cast<lowrank::Index>(state.range(0));
  const lowrank::Matrix z = noisy_low_rank(n, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lowrank::svd_full(z));
  }
}
BENCHMARK(BM_FullSvd)->Arg(100)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_SoftThreshold(benchmark::State& state) {
  const auto n = static_cast<lowrank::Index>(state.range(0));
  const lowrank::Matrix z = noisy_low_rank(n, 10);
  const double tau = static_cast<double>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lowrank::svt_soft_threshold(z, tau));
  }
}
BENCHMARK(BM_SoftThreshold)->Args({500, 1})->Args({500, 50})->Unit(benchmark::kMillisecond);

}  // namespace
