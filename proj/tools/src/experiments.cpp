#include "lowrank/bench/experiments.hpp"

#include "lowrank/bench/files.hpp"
#include "lowrank/parallel.hpp"
#include "lowrank/problems.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace lowrank::bench {

namespace {

// Solver X^0 seeds hang off the instance seed so every solver in a trial
// sees the same start.
constexpr std::uint64_t kSolverSeedTag = 0x78300000ULL;

Index rounded(double v) { return static_cast<Index>(std::llround(v)); }

std::string solver_list(const std::vector<SolverKind>& solvers) {
  std::string out;
  for (auto s : solvers) {
    if (!out.empty()) out += ';';
    out += to_string(s);
  }
  return out;
}

std::string opt_real(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("none");
}

}  // namespace

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Sampling: return "sampling";
    case SweepAxis::Rank: return "rank";
    case SweepAxis::Size: return "size";
  }
  return "?";
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view name) {
  for (auto a : {SweepAxis::Sampling, SweepAxis::Rank, SweepAxis::Size}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

std::vector<double> SweepConfig::default_values(SweepAxis axis) {
  std::vector<double> v;
  switch (axis) {
    case SweepAxis::Sampling:
      for (int i = 0; i < 10; ++i) v.push_back(0.06 + 0.02 * i);
      break;
    case SweepAxis::Rank:
      for (int r = 2; r <= 38; r += 4) v.push_back(r);
      break;
    case SweepAxis::Size:
      for (int n = 100; n <= 1900; n += 200) v.push_back(n);
      break;
  }
  return v;
}

std::vector<SweepPoint> sweep_points(const SweepConfig& cfg) {
  if (cfg.values.empty()) throw ParameterError("sweep needs at least one axis value");
  if (cfg.trials < 1) throw ParameterError("sweep needs at least one trial");
  if (cfg.solvers.empty()) throw ParameterError("sweep needs at least one solver");
  if (cfg.sampling_fraction && !(*cfg.sampling_fraction > 0.0 && *cfg.sampling_fraction <= 1.0)) {
    throw ParameterError("sampling fraction must lie in (0, 1]");
  }

  std::vector<SweepPoint> points;
  for (double v : cfg.values) {
    SweepPoint p{v, cfg.m, cfg.n, cfg.rank, cfg.r_true.value_or(cfg.rank), 0};
    switch (cfg.axis) {
      case SweepAxis::Sampling:
        if (!(v > 0.0 && v <= 1.0)) throw ParameterError("sampling value must lie in (0, 1]");
        p.d = rounded(v * static_cast<double>(p.m * p.n));
        break;
      case SweepAxis::Rank:
        if (v < 1.0 || v != std::floor(v)) throw ParameterError("rank values must be integers");
        p.rank = static_cast<Index>(v);
        p.r_true = cfg.r_true.value_or(p.rank);
        p.d = rounded(cfg.sampling_fraction.value_or(0.2) * static_cast<double>(p.m * p.n));
        break;
      case SweepAxis::Size:
        if (v < 2.0 || v != std::floor(v)) throw ParameterError("size values must be integers >= 2");
        p.m = p.n = static_cast<Index>(v);
        p.d = cfg.sampling_fraction
                  ? rounded(*cfg.sampling_fraction * static_cast<double>(p.m * p.n))
                  : sufficient_samples(p.n, p.rank, cfg.scale_c);
        break;
    }
    if (p.m < 1 || p.n < 1) throw ParameterError("sweep dimensions must be positive");
    const Index k = std::min(p.m, p.n);
    if (p.rank < 1 || p.rank > k || p.r_true < 1 || p.r_true > k) {
      throw ParameterError("sweep rank out of range at axis value " + format_double(v));
    }
    if (p.d < 1 || p.d > p.m * p.n) {
      throw ParameterError("sweep measurement count out of range at axis value " +
                           format_double(v));
    }
    points.push_back(p);
  }
  return points;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  const std::vector<SweepPoint> points = sweep_points(cfg);
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t nsolvers = cfg.solvers.size();

  struct Outcome {
    double snr = 0.0;
    double iterations = 0.0;
    double wall = 0.0;
  };
  std::vector<Outcome> outcomes(points.size() * trials * nsolvers);

  parallel_for(points.size() * trials, cfg.jobs, [&](std::size_t unit) {
    const std::size_t p = unit / trials;
    const std::size_t t = unit % trials;
    const SweepPoint& pt = points[p];
    const std::uint64_t seed = mix_seed(cfg.seed, p, t);
    const ProblemInstance inst = generate_instance(pt.m, pt.n, pt.r_true, pt.d, cfg.snr_m, seed);
    for (std::size_t s = 0; s < nsolvers; ++s) {
      SolverOptions opts = cfg.base;
      opts.rank = pt.rank;
      opts.seed = mix_seed(seed, kSolverSeedTag);
      const SolverResult res = run_solver(cfg.solvers[s], inst, opts);
      outcomes[unit * nsolvers + s] = {snr_reconstruction(*inst.x_true, res.x_hat),
                                       static_cast<double>(res.iterations), res.wall_time};
    }
  });

  std::vector<SweepRow> rows;
  rows.reserve(points.size() * nsolvers);
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t s = 0; s < nsolvers; ++s) {
      double snr = 0.0, iters = 0.0, wall = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const Outcome& o = outcomes[(p * trials + t) * nsolvers + s];
        snr += o.snr;
        iters += o.iterations;
        wall += o.wall;
      }
      const double k = static_cast<double>(trials);
      rows.push_back({points[p], cfg.solvers[s], snr / k, iters / k, wall / k});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<SweepRow>& rows,
                     bool with_timing, std::string_view timestamp) {
  os << "# lowrank-sweep axis=" << to_string(cfg.axis) << " m=" << cfg.m << " n=" << cfg.n
     << " r=" << cfg.rank << " snr_m=" << opt_real(cfg.snr_m)
     << " sampling_frac=" << opt_real(cfg.sampling_fraction)
     << " scale_c=" << format_double(cfg.scale_c) << " trials=" << cfg.trials
     << " seed=" << cfg.seed << " solvers=" << solver_list(cfg.solvers)
     << " mu=" << format_double(cfg.base.mu) << " tol=" << format_double(cfg.base.tol)
     << " max_iter=" << cfg.base.max_iter
     << " lambda_nn=" << format_double(cfg.base.nn.lambda_nn) << " created=" << timestamp
     << (with_timing ? " note=mean_wall_time_s_is_environment_dependent" : "") << '\n';
  os << "axis_value,m,n,r,d,solver,mean_snr_r,mean_iterations";
  if (with_timing) os << ",mean_wall_time_s";
  os << '\n';
  for (const SweepRow& r : rows) {
    os << format_double(r.point.axis_value) << ',' << r.point.m << ',' << r.point.n << ','
       << r.point.rank << ',' << r.point.d << ',' << to_string(r.solver) << ','
       << format_double(r.mean_snr_r) << ',' << format_double(r.mean_iterations);
    if (with_timing) os << ',' << format_double(r.mean_wall_time);
    os << '\n';
  }
}

std::vector<TraceRow> run_trace(const TraceConfig& cfg) {
  if (cfg.trials < 1) throw ParameterError("trace needs at least one trial");
  const Index r_true = cfg.r_true.value_or(cfg.rank);
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<TraceRecord>> traces(trials);

  // Validate sizes once before spending compute.
  SolverOptions probe = cfg.base;
  probe.rank = cfg.rank;
  detail::validate_options(probe, cfg.m, cfg.n);
  if (cfg.d < 1 || cfg.d > cfg.m * cfg.n) throw ParameterError("trace d out of range");
  if (r_true < 1 || r_true > std::min(cfg.m, cfg.n)) throw ParameterError("trace r_true out of range");

  parallel_for(trials, cfg.jobs, [&](std::size_t t) {
    const std::uint64_t seed = mix_seed(cfg.seed, 0, t);
    const ProblemInstance inst = generate_instance(cfg.m, cfg.n, r_true, cfg.d, cfg.snr_m, seed);
    SolverOptions opts = cfg.base;
    opts.rank = cfg.rank;
    opts.seed = mix_seed(seed, kSolverSeedTag);
    opts.record_trace = true;
    opts.stop_on_rel_change = false;
    opts.multiplier_tol.reset();
    traces[t] = run_solver(cfg.solver, inst, opts).trace;
  });

  const std::size_t len = traces.front().size();
  std::vector<TraceRow> rows;
  rows.reserve(len);
  for (std::size_t k = 0; k < len; ++k) {
    double lam = 0.0, rel = 0.0, snr = 0.0;
    for (const auto& tr : traces) {
      lam += tr[k].lambda_norm;
      rel += tr[k].rel_change;
      snr += tr[k].snr_r.value_or(std::numeric_limits<double>::quiet_NaN());
    }
    const double n = static_cast<double>(trials);
    rows.push_back({static_cast<int>(k + 1), lam / n, rel / n, snr / n});
  }
  return rows;
}

void write_trace_csv(std::ostream& os, const TraceConfig& cfg, const std::vector<TraceRow>& rows,
                     std::string_view timestamp) {
  os << "# lowrank-trace solver=" << to_string(cfg.solver) << " m=" << cfg.m << " n=" << cfg.n
     << " r=" << cfg.rank << " r_true=" << cfg.r_true.value_or(cfg.rank) << " d=" << cfg.d
     << " snr_m=" << opt_real(cfg.snr_m) << " trials=" << cfg.trials << " seed=" << cfg.seed
     << " mu=" << format_double(cfg.base.mu) << " max_iter=" << cfg.base.max_iter
     << " averaged_over_trials=1 created=" << timestamp << '\n';
  os << "k,lambda_fro_norm,rel_change,snr_r\n";
  for (const TraceRow& r : rows) {
    os << r.k << ',' << (std::isnan(r.lambda_norm) ? "NA" : format_double(r.lambda_norm)) << ','
       << format_double(r.rel_change) << ','
       << (std::isnan(r.snr_r) ? "NA" : format_double(r.snr_r)) << '\n';
  }
}

void write_phase_csv(std::ostream& os, const PhaseResult& res, SolverKind solver,
                     std::string_view timestamp) {
  const PhaseGrid& g = res.grid;
  os << "# lowrank-phase solver=" << to_string(solver) << " n=" << g.n << " trials=" << g.trials
     << " success_snr=" << format_double(g.success_snr) << " max_iter=" << g.max_iter
     << " seed=" << g.seed << " snr_m=" << opt_real(g.snr_m)
     << " rows=rank_fraction cols=sampling_fraction value=success_rate black=0 white=1"
     << " NA=infeasible created=" << timestamp << '\n';
  os << "rank_fraction";
  for (double sf : g.sampling_fractions) os << ',' << format_double(sf);
  os << '\n';
  for (std::size_t i = 0; i < g.rank_fractions.size(); ++i) {
    os << format_double(g.rank_fractions[i]);
    for (std::size_t j = 0; j < g.sampling_fractions.size(); ++j) {
      const PhaseCell& c = res.at(i, j);
      os << ',' << (c.feasible ? format_double(c.rate()) : std::string("NA"));
    }
    os << '\n';
  }
}

void write_phase_heatmap(std::ostream& os, const PhaseResult& res) {
  const PhaseGrid& g = res.grid;
  os << "# rank_fraction sampling_fraction success_rate (black=0 white=1, NaN=infeasible)\n";
  for (std::size_t i = 0; i < g.rank_fractions.size(); ++i) {
    for (std::size_t j = 0; j < g.sampling_fractions.size(); ++j) {
      const PhaseCell& c = res.at(i, j);
      os << format_double(g.rank_fractions[i]) << ' ' << format_double(g.sampling_fractions[j])
         << ' ' << (c.feasible ? format_double(c.rate()) : std::string("NaN")) << '\n';
    }
    os << '\n';
  }
}

}  // namespace lowrank::bench
