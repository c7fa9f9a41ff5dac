#pragma once

#include "lowrank/linalg.hpp"
#include "lowrank/operators.hpp"
#include "lowrank/problems.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lowrank {

/// Nuclear-norm ADMM baseline parameters: penalty starts at mu0 and grows by
/// rho per iteration up to mu_max; lambda_nn weights the nuclear norm.
struct NuclearNormOptions {
  double lambda_nn = 1.0;
  double mu0 = 1e-4;
  double rho = 1.1;
  double mu_max = 1e10;
};

struct SolverOptions {
  Index rank = 1;  // upper estimate r of the target rank
  double mu = 1.0;
  double tol = 1e-4;
  int max_iter = 500;
  std::optional<double> multiplier_tol;  // stop once ||Lambda||_F < this
  std::uint64_t seed = 0;                // drives the Gaussian X^0
  bool record_trace = false;
  bool enforce_mu_gt_2L = false;
  bool stop_on_rel_change = true;  // false: always run max_iter iterations
  std::optional<bool> use_smw;     // general path only; default: d < mn
  std::optional<Matrix> x0;        // overrides the Gaussian start
  NuclearNormOptions nn;
};

struct AdmmState {
  Matrix x;
  Matrix y;
  Matrix lambda;
  double mu = 1.0;
  int k = 0;
};

enum class StopReason { RelChange, MultiplierNorm, MaxIter };
std::string_view to_string(StopReason reason);

struct TraceRecord {
  double rel_change;
  double lambda_norm;  // NaN for solvers without a multiplier
  std::optional<double> snr_r;
};

struct SolverResult {
  Matrix x_hat;
  int iterations = 0;
  StopReason converged = StopReason::MaxIter;
  std::vector<TraceRecord> trace;
  double wall_time = 0.0;  // seconds
  double mu = 0.0;         // penalty actually used (final value for NN-ADMM)
  std::vector<std::string> warnings;
};

/// Called after every completed iteration with the new (X, Y, Lambda, mu, k).
using IterationObserver = std::function<void(const AdmmState&)>;

// Single ADMM steps, in the order they are applied: Y, then X, then Lambda.

/// P_C(X + Lambda / mu): rank-r truncated SVD projection.
Matrix y_update(const AdmmState& state, Index r);

/// Solves (2 A*A + mu I)(X) = 2 A*(b) + mu Y - Lambda with state.y already
/// holding Y^{k+1}.
Matrix x_update_general(const AdmmState& state, const MeasurementOperator& op, const Vector& b,
                        const NormalEquationSolver& solver);

/// (2 M + mu Y - Lambda) ./ (2 Omega + mu 1).
Matrix x_update_completion(const Matrix& m_meas, const Matrix& omega, const Matrix& y,
                           const Matrix& lambda, double mu);

/// Lambda + mu (X - Y).
Matrix multiplier_update(const AdmmState& state);

/// Rank-constrained matrix sensing ADMM on any operator. Sampling operators
/// are materialized as general operators, so keep them small.
SolverResult rcms_admm(const ProblemInstance& instance, const SolverOptions& opts,
                       const IterationObserver& observer = {});

/// Completion specialization: elementwise X-step. Requires a sampling operator.
SolverResult rcmc_admm(const ProblemInstance& instance, const SolverOptions& opts,
                       const IterationObserver& observer = {});

/// Normalized iterative hard thresholding for completion.
SolverResult niht(const ProblemInstance& instance, const SolverOptions& opts);

/// Nuclear-norm regularized least squares by ADMM with a growing penalty.
/// The relative-change stop is measured on Y, the returned estimate; an
/// all-zero Y never counts as converged.
SolverResult nn_admm(const ProblemInstance& instance, const SolverOptions& opts,
                     const IterationObserver& observer = {});

enum class SolverKind { RcAdmm, RcmsAdmmGeneral, Niht, NnAdmm };

std::string_view to_string(SolverKind kind);
/// Accepts "rc-admm", "rcms-admm-general", "niht", "nn-admm".
std::optional<SolverKind> parse_solver_kind(std::string_view name);

SolverResult run_solver(SolverKind kind, const ProblemInstance& instance,
                        const SolverOptions& opts);

namespace detail {
void validate_options(const SolverOptions& opts, Index m, Index n);
double relative_change(const Matrix& next, const Matrix& prev);
Matrix initial_iterate(const SolverOptions& opts, Index m, Index n);
}  // namespace detail

}  // namespace lowrank
