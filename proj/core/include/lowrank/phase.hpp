#pragma once

#include "lowrank/solvers.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lowrank {

/// Grid over (r/n, d/n^2) pairs for an n x n completion phase transition.
struct PhaseGrid {
  Index n = 100;
  std::vector<double> rank_fractions;
  std::vector<double> sampling_fractions;
  int trials = 10;
  double success_snr = 70.0;  // dB
  int max_iter = 500;
  std::uint64_t seed = 0;
  std::optional<double> snr_m;  // noiseless when empty

  /// r/n and d/n^2 both over 0.02:0.02:0.5.
  static PhaseGrid full(Index n = 100);
  /// 3 x 3 grid for quick runs.
  static PhaseGrid reduced(Index n = 100);

  void validate() const;
};

struct PhaseCell {
  double rank_fraction = 0.0;
  double sampling_fraction = 0.0;
  Index rank = 0;
  Index samples = 0;
  bool feasible = false;
  int successes = 0;
  int trials = 0;

  double rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
};

struct PhaseResult {
  PhaseGrid grid;
  std::vector<PhaseCell> cells;  // row-major: rank fraction rows, sampling fraction columns

  const PhaseCell& at(std::size_t rank_idx, std::size_t sampling_idx) const {
    return cells[rank_idx * grid.sampling_fractions.size() + sampling_idx];
  }
};

/// For each feasible pair, the fraction of trials reaching success_snr after
/// exactly max_iter iterations (relative-change stop disabled). Each trial's
/// instance seed derives from (grid seed, cell index, trial index), so the
/// result does not depend on `jobs`.
PhaseResult run_phase_transition(const PhaseGrid& grid, SolverKind solver,
                                 const SolverOptions& base = {}, int jobs = 1);

}  // namespace lowrank
