#include "lowrank/phase.hpp"

#include "lowrank/parallel.hpp"

#include <cmath>
#include <string>

namespace lowrank {

namespace {

std::vector<double> stepped(double first, double step, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(first + step * i);
  return out;
}

}  // namespace

PhaseGrid PhaseGrid::full(Index n) {
  PhaseGrid g;
  g.n = n;
  g.rank_fractions = stepped(0.02, 0.02, 25);
  g.sampling_fractions = stepped(0.02, 0.02, 25);
  return g;
}

PhaseGrid PhaseGrid::reduced(Index n) {
  PhaseGrid g;
  g.n = n;
  g.rank_fractions = {0.04, 0.2, 0.4};
  g.sampling_fractions = {0.05, 0.2, 0.4};
  return g;
}

void PhaseGrid::validate() const {
  if (n < 2) throw ParameterError("phase grid needs n >= 2");
  if (trials < 1) throw ParameterError("phase grid needs at least one trial");
  if (max_iter < 1) throw ParameterError("phase grid needs max_iter >= 1");
  if (rank_fractions.empty() || sampling_fractions.empty()) {
    throw ParameterError("phase grid axes must be nonempty");
  }
  for (const auto* axis : {&rank_fractions, &sampling_fractions}) {
    for (double f : *axis) {
      if (!(f > 0.0 && f <= 1.0)) {
        throw ParameterError("phase grid fraction " + std::to_string(f) + " outside (0, 1]");
      }
    }
  }
}

PhaseResult run_phase_transition(const PhaseGrid& grid, SolverKind solver,
                                 const SolverOptions& base, int jobs) {
  grid.validate();
  const Index n = grid.n;
  PhaseResult result{grid, {}};
  result.cells.reserve(grid.rank_fractions.size() * grid.sampling_fractions.size());
  for (double rf : grid.rank_fractions) {
    for (double sf : grid.sampling_fractions) {
      PhaseCell cell;
      cell.rank_fraction = rf;
      cell.sampling_fraction = sf;
      cell.rank = static_cast<Index>(std::llround(rf * static_cast<double>(n)));
      cell.samples = static_cast<Index>(std::llround(sf * static_cast<double>(n * n)));
      cell.feasible = cell.rank >= 1 && cell.rank <= n && cell.samples >= 1 &&
                      cell.samples <= n * n;
      cell.trials = cell.feasible ? grid.trials : 0;
      result.cells.push_back(cell);
    }
  }

  const std::size_t trials = static_cast<std::size_t>(grid.trials);
  std::vector<char> success(result.cells.size() * trials, 0);
  parallel_for(success.size(), jobs, [&](std::size_t unit) {
    const std::size_t c = unit / trials;
    const std::size_t t = unit % trials;
    const PhaseCell& cell = result.cells[c];
    if (!cell.feasible) return;
    const std::uint64_t seed = mix_seed(grid.seed, c, t);
    const ProblemInstance inst =
        generate_instance(n, n, cell.rank, cell.samples, grid.snr_m, seed);
    SolverOptions opts = base;
    opts.rank = cell.rank;
    opts.max_iter = grid.max_iter;
    opts.stop_on_rel_change = false;
    opts.multiplier_tol.reset();
    opts.record_trace = false;
    opts.seed = mix_seed(seed, 0x78300000ULL);
    const SolverResult res = run_solver(solver, inst, opts);
    success[unit] = snr_reconstruction(*inst.x_true, res.x_hat) >= grid.success_snr ? 1 : 0;
  });

  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    for (std::size_t t = 0; t < trials; ++t) result.cells[c].successes += success[c * trials + t];
  }
  return result;
}

}  // namespace lowrank
