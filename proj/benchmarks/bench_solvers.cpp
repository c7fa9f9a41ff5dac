#include "lowrank/operators.hpp"
#include "lowrank/problems.hpp"
#include "lowrank/solvers.hpp"

#include <benchmark/benchmark.h>

namespace {

// Fixed iteration budget so the timing is per-iteration cost, not convergence.
void run_fixed(benchmark::State& state, lowrank::SolverKind kind) {
  const auto n = static_cast<lowrank::Index>(state.range(0));
  const lowrank::Index r = 10;
  const auto d = static_cast<lowrank::Index>(0.2 * static_cast<double>(n * n));
  const auto inst = lowrank::generate_instance(n, n, r, d, 20.0, 11);
  lowrank::SolverOptions opts;
  opts.rank = r;
  opts.max_iter = 10;
  opts.stop_on_rel_change = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lowrank::run_solver(kind, inst, opts));
  }
  state.counters["iterations"] = 10;
}

void BM_RcAdmm10(benchmark::State& state) { run_fixed(state, lowrank::SolverKind::RcAdmm); }
void BM_Niht10(benchmark::State& state) { run_fixed(state, lowrank::SolverKind::Niht); }
void BM_NnAdmm10(benchmark::State& state) { run_fixed(state, lowrank::SolverKind::NnAdmm); }

BENCHMARK(BM_RcAdmm10)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Niht10)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NnAdmm10)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_NormalSolverSmw(benchmark::State& state) {
  const auto n = static_cast<lowrank::Index>(state.range(0));
  const auto inst = lowrank::generate_sensing_instance(n, n, 2, 3 * n * 2, std::nullopt, 3);
  const auto solver = lowrank::build_normal_solver(inst.op, 1.0, true);
  lowrank::Rng rng(5);
  const lowrank::Matrix rhs = lowrank::gaussian_matrix(n, n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.solve(rhs));
  }
}
BENCHMARK(BM_NormalSolverSmw)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

}  // namespace
