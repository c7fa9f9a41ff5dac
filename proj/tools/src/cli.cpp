#include "lowrank/bench/cli.hpp"

#include "lowrank/bench/experiments.hpp"
#include "lowrank/bench/files.hpp"
#include "lowrank/phase.hpp"
#include "lowrank/problems.hpp"
#include "lowrank/solvers.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace lowrank::bench {

namespace {

/// Thrown for configuration problems detected after CLI11 parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::optional<Index> m, n, r, r_true, d;
  std::optional<double> sampling_frac, snr_m, multiplier_tol;
  std::string solver = "rc-admm";
  std::vector<std::string> solvers;
  double mu = 1.0;
  double lambda_nn = 1.0;
  double tol = 1e-4;
  int max_iter = 500;
  std::optional<int> trials;
  std::uint64_t seed = 0;
  double scale_c = 1.0;
  int jobs = 0;
  std::string out;
  std::string instance;
  std::string save_instance;
  bool mu_safe = false;
  // sweep
  std::string axis = "sampling";
  std::vector<double> values;
  bool no_timing = false;
  // phase
  std::string grid = "reduced";
  std::vector<double> rank_fracs, sampling_fracs;
  double success_snr = 70.0;
};

void add_problem_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--m", f.m, "Number of rows");
  cmd.add_option("--n", f.n, "Number of columns (defaults to m)");
  cmd.add_option("--r", f.r, "Rank estimate given to the solver");
  cmd.add_option("--r-true", f.r_true, "Rank of the generated ground truth (defaults to r)");
  cmd.add_option("--d", f.d, "Number of observed entries");
  cmd.add_option("--sampling-frac", f.sampling_frac, "Observed fraction d/mn");
  cmd.add_option("--snr-m", f.snr_m, "Measurement SNR in dB (noiseless when omitted)");
  cmd.add_option("--seed", f.seed, "Master seed (LOWRANK_ADMM_SEED overrides)");
}

void add_solver_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--mu", f.mu, "ADMM penalty")->capture_default_str();
  cmd.add_option("--lambda-nn", f.lambda_nn, "Nuclear-norm weight for nn-admm")
      ->capture_default_str();
  cmd.add_option("--tol", f.tol, "Relative-change stopping tolerance")->capture_default_str();
  cmd.add_option("--max-iter", f.max_iter, "Iteration cap")->capture_default_str();
  cmd.add_option("--multiplier-tol", f.multiplier_tol, "Stop once ||Lambda||_F drops below");
  cmd.add_flag("--mu-safe", f.mu_safe, "Raise mu above 2L (convergence-theory regime)");
}

void add_run_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--trials", f.trials, "Trials per configuration");
  cmd.add_option("--jobs", f.jobs, "Worker threads (0 = logical cores)")->capture_default_str();
  cmd.add_option("--out", f.out, "Output file");
}

std::uint64_t effective_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("LOWRANK_ADMM_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw UsageError("LOWRANK_ADMM_SEED is not an integer");
    return v;
  }
  return seed;
}

SolverKind solver_kind(const std::string& name) {
  if (auto k = parse_solver_kind(name)) return *k;
  throw UsageError("unknown solver '" + name +
                   "' (expected rc-admm, rcms-admm-general, niht or nn-admm)");
}

SolverOptions solver_options(const Flags& f) {
  SolverOptions o;
  o.mu = f.mu;
  o.tol = f.tol;
  o.max_iter = f.max_iter;
  o.multiplier_tol = f.multiplier_tol;
  o.enforce_mu_gt_2L = f.mu_safe;
  o.nn.lambda_nn = f.lambda_nn;
  if (!(o.mu > 0.0)) throw UsageError("--mu must be positive");
  if (!(o.tol > 0.0)) throw UsageError("--tol must be positive");
  if (o.max_iter < 1) throw UsageError("--max-iter must be at least 1");
  if (o.multiplier_tol && !(*o.multiplier_tol > 0.0)) {
    throw UsageError("--multiplier-tol must be positive");
  }
  if (!(o.nn.lambda_nn >= 0.0)) throw UsageError("--lambda-nn must be nonnegative");
  return o;
}

Index measurement_count(const Flags& f, Index m, Index n) {
  if (f.d && f.sampling_frac) throw UsageError("give either --d or --sampling-frac, not both");
  Index d = 0;
  if (f.d) {
    d = *f.d;
  } else if (f.sampling_frac) {
    if (!(*f.sampling_frac > 0.0 && *f.sampling_frac <= 1.0)) {
      throw UsageError("--sampling-frac must lie in (0, 1]");
    }
    d = static_cast<Index>(std::llround(*f.sampling_frac * static_cast<double>(m * n)));
  } else {
    throw UsageError("need --d or --sampling-frac");
  }
  if (d < 1 || d > m * n) {
    throw UsageError("measurement count d=" + std::to_string(d) + " outside [1, " +
                     std::to_string(m * n) + "]");
  }
  return d;
}

int checked_trials(const Flags& f, int fallback) {
  const int t = f.trials.value_or(fallback);
  if (t < 1) throw UsageError("--trials must be at least 1");
  return t;
}

void require_dims(Index m, Index n) {
  if (m < 1 || n < 1) throw UsageError("matrix dimensions must be positive");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  return os;
}

// Instance files written by this tool carry the generation seed; when the
// regenerated instance matches bit-for-bit the ground truth is recovered.
ProblemInstance load_instance(const std::string& path) {
  const InstanceFile file = InstanceFile::load(path);
  ProblemInstance inst = file.to_instance();
  const InstanceHeader& h = file.header;
  if (h.r_true && h.seed) {
    ProblemInstance regen = generate_instance(h.m, h.n, *h.r_true, h.d, h.snr_m, *h.seed);
    if (regen.op.pattern().observed() == file.pattern.observed() && regen.b == file.values) {
      inst.x_true = std::move(regen.x_true);
      inst.noise = std::move(regen.noise);
    }
  }
  return inst;
}

int cmd_solve(const Flags& f, std::ostream& out) {
  const SolverKind kind = solver_kind(f.solver);
  SolverOptions opts = solver_options(f);
  const std::uint64_t seed = effective_seed(f.seed);

  ProblemInstance inst = [&] {
    if (!f.instance.empty()) return load_instance(f.instance);
    if (!f.m) throw UsageError("need --instance or --m");
    const Index m = *f.m;
    const Index n = f.n.value_or(m);
    require_dims(m, n);
    const Index d = measurement_count(f, m, n);
    const std::optional<Index> r_true = f.r_true ? f.r_true : f.r;
    if (!r_true) throw UsageError("need --r-true or --r to generate an instance");
    if (*r_true < 1 || *r_true > std::min(m, n)) throw UsageError("--r-true out of range");
    return generate_instance(m, n, *r_true, d, f.snr_m, seed);
  }();

  const std::optional<Index> r = f.r ? f.r : inst.r_true;
  if (!r) throw UsageError("need --r (instance has no r_true)");
  if (*r < 1 || *r > std::min(inst.rows(), inst.cols())) throw UsageError("--r out of range");
  opts.rank = *r;
  opts.seed = mix_seed(seed, 0x78300000ULL);

  if (!f.save_instance.empty()) InstanceFile::from_instance(inst, seed).save(f.save_instance);

  const SolverResult res = run_solver(kind, inst, opts);
  ResultRecord rec{std::string(to_string(kind)), inst.rows(), inst.cols(), inst.measurements(),
                   opts.rank, res.mu, res.iterations, res.converged, std::nullopt, res.wall_time};
  if (inst.x_true) rec.snr_r = snr_reconstruction(*inst.x_true, res.x_hat);

  for (const auto& w : res.warnings) out << "warning: " << w << '\n';
  out << "solver      " << rec.solver << '\n'
      << "size        " << rec.m << "x" << rec.n << ", d=" << rec.d << ", r=" << rec.rank << '\n'
      << "iterations  " << rec.iterations << '\n'
      << "converged   " << to_string(rec.converged) << '\n'
      << "snr_r       " << (rec.snr_r ? format_double(*rec.snr_r) + " dB" : "NA") << '\n'
      << "wall_time   " << format_double(rec.wall_time) << " s\n";

  if (!f.out.empty()) {
    auto os = open_out(f.out);
    write_result_header(os, "created=" + utc_timestamp() +
                                " seed=" + std::to_string(seed) +
                                " note=wall_time_s_is_environment_dependent");
    write_result_row(os, rec);
  }
  return kExitOk;
}

int cmd_sweep(const Flags& f, std::ostream& out) {
  SweepConfig cfg;
  const auto axis = parse_sweep_axis(f.axis);
  if (!axis) throw UsageError("unknown sweep axis '" + f.axis + "' (sampling, rank or size)");
  cfg.axis = *axis;
  cfg.values = f.values.empty() ? SweepConfig::default_values(cfg.axis) : f.values;
  cfg.m = f.m.value_or(500);
  cfg.n = f.n.value_or(cfg.m);
  require_dims(cfg.m, cfg.n);
  cfg.rank = f.r.value_or(10);
  cfg.r_true = f.r_true;
  if (f.d) throw UsageError("sweep takes --sampling-frac, not --d");
  cfg.sampling_fraction = f.sampling_frac;
  cfg.snr_m = f.snr_m;
  cfg.scale_c = f.scale_c;
  if (!(cfg.scale_c > 0.0)) throw UsageError("--scale-c must be positive");
  cfg.trials = checked_trials(f, 10);
  cfg.seed = effective_seed(f.seed);
  cfg.base = solver_options(f);
  cfg.jobs = f.jobs;
  if (!f.solvers.empty()) {
    cfg.solvers.clear();
    for (const auto& s : f.solvers) cfg.solvers.push_back(solver_kind(s));
  }
  try {
    (void)sweep_points(cfg);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }

  const auto rows = run_sweep(cfg);
  const std::string stamp = utc_timestamp();
  if (f.out.empty()) {
    write_sweep_csv(out, cfg, rows, !f.no_timing, stamp);
  } else {
    auto os = open_out(f.out);
    write_sweep_csv(os, cfg, rows, !f.no_timing, stamp);
    out << "wrote " << rows.size() << " rows to " << f.out << '\n';
  }
  return kExitOk;
}

std::string heatmap_path(const std::string& csv) {
  const auto dot = csv.rfind('.');
  const auto slash = csv.rfind('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return csv.substr(0, dot) + ".dat";
  }
  return csv + ".dat";
}

int cmd_phase(const Flags& f, std::ostream& out) {
  const SolverKind kind = solver_kind(f.solver);
  const Index n = f.n.value_or(f.m.value_or(100));
  PhaseGrid grid;
  if (f.grid == "full") {
    grid = PhaseGrid::full(n);
  } else if (f.grid == "reduced") {
    grid = PhaseGrid::reduced(n);
  } else {
    throw UsageError("unknown --grid '" + f.grid + "' (full or reduced)");
  }
  if (!f.rank_fracs.empty()) grid.rank_fractions = f.rank_fracs;
  if (!f.sampling_fracs.empty()) grid.sampling_fractions = f.sampling_fracs;
  grid.trials = checked_trials(f, 10);
  grid.success_snr = f.success_snr;
  grid.max_iter = f.max_iter;
  grid.seed = effective_seed(f.seed);
  grid.snr_m = f.snr_m;
  try {
    grid.validate();
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  SolverOptions base = solver_options(f);

  const PhaseResult res = run_phase_transition(grid, kind, base, f.jobs);
  const std::string stamp = utc_timestamp();
  if (f.out.empty()) {
    write_phase_csv(out, res, kind, stamp);
  } else {
    {
      auto os = open_out(f.out);
      write_phase_csv(os, res, kind, stamp);
    }
    const std::string dat = heatmap_path(f.out);
    auto hs = open_out(dat);
    write_phase_heatmap(hs, res);
    out << "wrote " << res.cells.size() << " cells to " << f.out << " and " << dat << '\n';
  }
  return kExitOk;
}

int cmd_trace(const Flags& f, std::ostream& out) {
  TraceConfig cfg;
  cfg.solver = solver_kind(f.solver);
  cfg.m = f.m.value_or(500);
  cfg.n = f.n.value_or(cfg.m);
  require_dims(cfg.m, cfg.n);
  cfg.rank = f.r.value_or(20);
  cfg.r_true = f.r_true;
  if (!f.d && !f.sampling_frac) {
    cfg.d = static_cast<Index>(std::llround(0.2 * static_cast<double>(cfg.m * cfg.n)));
  } else {
    cfg.d = measurement_count(f, cfg.m, cfg.n);
  }
  cfg.snr_m = f.snr_m;
  cfg.trials = checked_trials(f, 10);
  cfg.seed = effective_seed(f.seed);
  cfg.base = solver_options(f);
  cfg.jobs = f.jobs;
  if (cfg.rank < 1 || cfg.rank > std::min(cfg.m, cfg.n)) throw UsageError("--r out of range");
  if (cfg.r_true && (*cfg.r_true < 1 || *cfg.r_true > std::min(cfg.m, cfg.n))) {
    throw UsageError("--r-true out of range");
  }

  const auto rows = run_trace(cfg);
  const std::string stamp = utc_timestamp();
  if (f.out.empty()) {
    write_trace_csv(out, cfg, rows, stamp);
  } else {
    auto os = open_out(f.out);
    write_trace_csv(os, cfg, rows, stamp);
    out << "wrote " << rows.size() << " iterations to " << f.out << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-rank matrix recovery by rank-constrained ADMM: solvers and benchmarks",
               "lowrank-admm"};
  app.require_subcommand(1, 1);
  Flags f;

  auto* solve = app.add_subcommand("solve", "Solve one generated or loaded completion instance");
  add_problem_flags(*solve, f);
  add_solver_flags(*solve, f);
  add_run_flags(*solve, f);
  solve->add_option("--solver", f.solver, "rc-admm | rcms-admm-general | niht | nn-admm")
      ->capture_default_str();
  solve->add_option("--instance", f.instance, "Read the instance from this file");
  solve->add_option("--save-instance", f.save_instance, "Write the instance to this file");

  auto* sweep = app.add_subcommand("sweep", "Compare solvers along one axis (CSV output)");
  add_problem_flags(*sweep, f);
  add_solver_flags(*sweep, f);
  add_run_flags(*sweep, f);
  sweep->add_option("--axis", f.axis, "sampling | rank | size")->capture_default_str();
  sweep->add_option("--values", f.values, "Axis values (defaults to the standard grid)")
      ->delimiter(',');
  sweep->add_option("--solvers", f.solvers, "Comma-separated solvers")->delimiter(',');
  sweep->add_option("--scale-c", f.scale_c, "Constant in the sufficient-sampling rule")
      ->capture_default_str();
  sweep->add_flag("--no-timing", f.no_timing, "Omit the wall-time column");

  auto* phase = app.add_subcommand("phase", "Success-rate grid over (r/n, d/n^2)");
  add_problem_flags(*phase, f);
  add_solver_flags(*phase, f);
  add_run_flags(*phase, f);
  phase->add_option("--solver", f.solver, "Solver")->capture_default_str();
  phase->add_option("--grid", f.grid, "full (25x25) | reduced (3x3)")->capture_default_str();
  phase->add_option("--rank-fracs", f.rank_fracs, "Override r/n values")->delimiter(',');
  phase->add_option("--sampling-fracs", f.sampling_fracs, "Override d/n^2 values")
      ->delimiter(',');
  phase->add_option("--success-snr", f.success_snr, "Success threshold in dB")
      ->capture_default_str();

  auto* trace = app.add_subcommand("trace", "Per-iteration multiplier / change / SNR trace");
  add_problem_flags(*trace, f);
  add_solver_flags(*trace, f);
  add_run_flags(*trace, f);
  trace->add_option("--solver", f.solver, "Solver")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(f, out);
    if (sweep->parsed()) return cmd_sweep(f, out);
    if (phase->parsed()) return cmd_phase(f, out);
    return cmd_trace(f, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nrun 'lowrank-admm <command> --help' for usage\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace lowrank::bench
