#pragma once

#include "lowrank/phase.hpp"
#include "lowrank/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lowrank::bench {

enum class SweepAxis { Sampling, Rank, Size };

std::string_view to_string(SweepAxis axis);
std::optional<SweepAxis> parse_sweep_axis(std::string_view name);

/// Comparison sweep over one axis. For every axis value, `trials` completion
/// instances are generated and each solver runs on the same instances.
///
///   Sampling: value = d/mn,  uses m, n, rank
///   Rank:     value = r,     uses m, n, sampling_fraction
///   Size:     value = n = m, uses rank and d = sufficient_samples(n, r, scale_c)
///             unless sampling_fraction is set
struct SweepConfig {
  SweepAxis axis = SweepAxis::Sampling;
  std::vector<double> values;
  Index m = 500;
  Index n = 500;
  Index rank = 10;
  std::optional<Index> r_true;  // defaults to the solver rank
  std::optional<double> sampling_fraction;
  std::optional<double> snr_m = 20.0;
  double scale_c = 1.0;
  int trials = 10;
  std::uint64_t seed = 0;
  std::vector<SolverKind> solvers{SolverKind::Niht, SolverKind::NnAdmm, SolverKind::RcAdmm};
  SolverOptions base;  // tolerances, mu, lambda_nn, ...
  int jobs = 1;

  /// Default axis values of the standard comparison grids.
  static std::vector<double> default_values(SweepAxis axis);
};

struct SweepPoint {
  double axis_value;
  Index m;
  Index n;
  Index rank;
  Index r_true;
  Index d;
};

struct SweepRow {
  SweepPoint point;
  SolverKind solver;
  double mean_snr_r;
  double mean_iterations;
  double mean_wall_time;
};

/// Resolves the concrete problem sizes for every axis value; throws
/// ParameterError on the first invalid one.
std::vector<SweepPoint> sweep_points(const SweepConfig& cfg);

/// Rows ordered by axis value, then by the order of cfg.solvers.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

/// Header line + column line + rows. The wall-time column is omitted when
/// `with_timing` is false so bodies compare byte-for-byte between runs.
void write_sweep_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<SweepRow>& rows,
                     bool with_timing, std::string_view timestamp);

/// Averaged per-iteration trace of one solver over several trials, always
/// running exactly max_iter iterations.
struct TraceConfig {
  Index m = 500;
  Index n = 500;
  Index rank = 20;
  std::optional<Index> r_true;
  Index d = 50000;
  std::optional<double> snr_m;  // noiseless by default
  int trials = 10;
  std::uint64_t seed = 0;
  SolverKind solver = SolverKind::RcAdmm;
  SolverOptions base;
  int jobs = 1;
};

struct TraceRow {
  int k;
  double lambda_norm;
  double rel_change;
  double snr_r;
};

std::vector<TraceRow> run_trace(const TraceConfig& cfg);

void write_trace_csv(std::ostream& os, const TraceConfig& cfg, const std::vector<TraceRow>& rows,
                     std::string_view timestamp);

/// Dense success-rate grid: rows are rank fractions, columns sampling
/// fractions, "NA" for infeasible cells.
void write_phase_csv(std::ostream& os, const PhaseResult& res, SolverKind solver,
                     std::string_view timestamp);

/// gnuplot "with image" data: one "r/n d/n^2 rate" line per cell, a blank
/// line after each rank row, NaN for infeasible cells.
void write_phase_heatmap(std::ostream& os, const PhaseResult& res);

}  // namespace lowrank::bench
