#include "lowrank/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace lowrank {

namespace detail {

void validate_options(const SolverOptions& opts, Index m, Index n) {
  if (opts.rank < 1 || opts.rank > std::min(m, n)) {
    throw ParameterError("rank estimate " + std::to_string(opts.rank) + " outside [1, " +
                         std::to_string(std::min(m, n)) + "]");
  }
  if (!(opts.mu > 0.0) || !std::isfinite(opts.mu)) throw ParameterError("mu must be positive");
  if (!(opts.tol > 0.0)) throw ParameterError("tol must be positive");
  if (opts.max_iter < 1) throw ParameterError("max_iter must be at least 1");
  if (opts.multiplier_tol && !(*opts.multiplier_tol > 0.0)) {
    throw ParameterError("multiplier_tol must be positive");
  }
  if (opts.x0 && (opts.x0->rows() != m || opts.x0->cols() != n)) {
    throw ParameterError("initial iterate has the wrong shape");
  }
  if (opts.x0) require_finite(*opts.x0, "initial iterate");
}

double relative_change(const Matrix& next, const Matrix& prev) {
  return (next - prev).norm() / std::max(prev.norm(), 1e-30);
}

Matrix initial_iterate(const SolverOptions& opts, Index m, Index n) {
  if (opts.x0) return *opts.x0;
  Rng rng(opts.seed);
  return gaussian_matrix(m, n, rng);
}

}  // namespace detail

namespace {

using Clock = std::chrono::steady_clock;

double effective_mu(const SolverOptions& opts, const MeasurementOperator& op,
                    std::vector<std::string>& warnings) {
  if (!opts.enforce_mu_gt_2L) return opts.mu;
  const double two_l = 2.0 * op.lipschitz_constant();
  if (opts.mu > two_l) return opts.mu;
  const double raised = two_l + 1e-6 * std::max(1.0, two_l);
  std::ostringstream msg;
  msg.precision(17);
  msg << "mu raised from " << opts.mu << " to " << raised << " (2L = " << two_l << ")";
  warnings.push_back(msg.str());
  return raised;
}

template <class XStep>
SolverResult admm_loop(const ProblemInstance& instance, const SolverOptions& opts, double mu,
                       XStep&& x_step, const IterationObserver& observer,
                       std::vector<std::string> warnings) {
  const auto start = Clock::now();
  const Index m = instance.rows();
  const Index n = instance.cols();

  AdmmState s{detail::initial_iterate(opts, m, n), Matrix::Zero(m, n), Matrix::Zero(m, n), mu, 0};
  SolverResult result;
  result.warnings = std::move(warnings);
  if (opts.record_trace) result.trace.reserve(static_cast<std::size_t>(opts.max_iter));

  while (s.k < opts.max_iter) {
    try {
      s.y = y_update(s, opts.rank);
    } catch (const SvdError& e) {
      throw e.at_iteration(s.k + 1);
    }
    Matrix x = x_step(s);
    const double rel = detail::relative_change(x, s.x);
    s.x = std::move(x);
    s.lambda = multiplier_update(s);
    ++s.k;

    const double lambda_norm = s.lambda.norm();
    if (opts.record_trace) {
      std::optional<double> snr;
      if (instance.x_true) snr = snr_reconstruction(*instance.x_true, s.y);
      result.trace.push_back({rel, lambda_norm, snr});
    }
    if (observer) observer(s);

    if (opts.multiplier_tol && lambda_norm < *opts.multiplier_tol) {
      result.converged = StopReason::MultiplierNorm;
      break;
    }
    if (opts.stop_on_rel_change && rel < opts.tol) {
      result.converged = StopReason::RelChange;
      break;
    }
  }

  result.x_hat = std::move(s.y);
  result.iterations = s.k;
  result.mu = mu;
  result.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::RelChange: return "RelChange";
    case StopReason::MultiplierNorm: return "MultiplierNorm";
    case StopReason::MaxIter: return "MaxIter";
  }
  return "?";
}

Matrix y_update(const AdmmState& state, Index r) {
  return truncated_svd_project(state.x + state.lambda / state.mu, r);
}

Matrix x_update_general(const AdmmState& state, const MeasurementOperator& op, const Vector& b,
                        const NormalEquationSolver& solver) {
  const Matrix rhs = 2.0 * op.adjoint(b) + state.mu * state.y - state.lambda;
  return solver.solve(rhs);
}

Matrix x_update_completion(const Matrix& m_meas, const Matrix& omega, const Matrix& y,
                           const Matrix& lambda, double mu) {
  if (omega.rows() != m_meas.rows() || omega.cols() != m_meas.cols() ||
      y.rows() != m_meas.rows() || y.cols() != m_meas.cols() ||
      lambda.rows() != m_meas.rows() || lambda.cols() != m_meas.cols()) {
    throw ParameterError("completion update: shape mismatch");
  }
  if (!(mu > 0.0)) throw ParameterError("mu must be positive");
  const Matrix denom = (2.0 * omega).array() + mu;
  return (2.0 * m_meas + mu * y - lambda).cwiseQuotient(denom);
}

Matrix multiplier_update(const AdmmState& state) {
  return state.lambda + state.mu * (state.x - state.y);
}

SolverResult rcms_admm(const ProblemInstance& instance, const SolverOptions& opts,
                       const IterationObserver& observer) {
  instance.validate();
  detail::validate_options(opts, instance.rows(), instance.cols());
  const MeasurementOperator op = instance.op.to_general();

  std::vector<std::string> warnings;
  const double mu = effective_mu(opts, op, warnings);
  const bool smw = opts.use_smw.value_or(op.measurements() < op.rows() * op.cols());
  const NormalEquationSolver solver = build_normal_solver(op, mu, smw);
  // 2 A*(b) is iteration-invariant.
  const Matrix two_adj_b = 2.0 * op.adjoint(instance.b);

  auto x_step = [&](const AdmmState& s) {
    return solver.solve(two_adj_b + s.mu * s.y - s.lambda);
  };
  return admm_loop(instance, opts, mu, x_step, observer, std::move(warnings));
}

SolverResult rcmc_admm(const ProblemInstance& instance, const SolverOptions& opts,
                       const IterationObserver& observer) {
  if (!instance.op.is_sampling()) {
    throw ParameterError("rcmc_admm needs a sampling operator");
  }
  instance.validate();
  detail::validate_options(opts, instance.rows(), instance.cols());

  std::vector<std::string> warnings;
  const double mu = effective_mu(opts, instance.op, warnings);
  const SamplingPattern& pattern = instance.op.pattern();
  const Matrix two_m = 2.0 * embed_measurements(pattern, instance.b);
  const Matrix denom = (2.0 * pattern.mask()).array() + mu;

  auto x_step = [&](const AdmmState& s) -> Matrix {
    return (two_m + s.mu * s.y - s.lambda).cwiseQuotient(denom);
  };
  return admm_loop(instance, opts, mu, x_step, observer, std::move(warnings));
}

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::RcAdmm: return "rc-admm";
    case SolverKind::RcmsAdmmGeneral: return "rcms-admm-general";
    case SolverKind::Niht: return "niht";
    case SolverKind::NnAdmm: return "nn-admm";
  }
  return "?";
}

std::optional<SolverKind> parse_solver_kind(std::string_view name) {
  for (auto kind : {SolverKind::RcAdmm, SolverKind::RcmsAdmmGeneral, SolverKind::Niht,
                    SolverKind::NnAdmm}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

SolverResult run_solver(SolverKind kind, const ProblemInstance& instance,
                        const SolverOptions& opts) {
  switch (kind) {
    case SolverKind::RcAdmm: return rcmc_admm(instance, opts);
    case SolverKind::RcmsAdmmGeneral: return rcms_admm(instance, opts);
    case SolverKind::Niht: return niht(instance, opts);
    case SolverKind::NnAdmm: return nn_admm(instance, opts);
  }
  throw ParameterError("unknown solver");
}

}  // namespace lowrank
