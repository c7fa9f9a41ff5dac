#include "lowrank/solvers.hpp"

#include <algorithm>
#include <chrono>

namespace lowrank {

// ADMM for  min ||A(X) - b||^2 + lambda_nn ||Y||_*  s.t.  X = Y
// with the penalty increased geometrically after every multiplier step.
SolverResult nn_admm(const ProblemInstance& instance, const SolverOptions& opts,
                     const IterationObserver& observer) {
  if (!instance.op.is_sampling()) throw ParameterError("nn_admm needs a sampling operator");
  instance.validate();
  detail::validate_options(opts, instance.rows(), instance.cols());
  const NuclearNormOptions& nn = opts.nn;
  if (!(nn.lambda_nn >= 0.0)) throw ParameterError("lambda_nn must be nonnegative");
  if (!(nn.mu0 > 0.0) || !(nn.rho >= 1.0) || !(nn.mu_max >= nn.mu0)) {
    throw ParameterError("invalid nuclear-norm penalty schedule");
  }

  const auto start = std::chrono::steady_clock::now();
  const Index m = instance.rows();
  const Index n = instance.cols();
  const SamplingPattern& pattern = instance.op.pattern();
  const Matrix two_m = 2.0 * embed_measurements(pattern, instance.b);
  const Matrix two_omega = 2.0 * pattern.mask();

  AdmmState s{detail::initial_iterate(opts, m, n), Matrix::Zero(m, n), Matrix::Zero(m, n), nn.mu0,
              0};
  SolverResult result;
  if (opts.record_trace) result.trace.reserve(static_cast<std::size_t>(opts.max_iter));

  while (s.k < opts.max_iter) {
    const Matrix y_prev = s.y;
    try {
      s.y = svt_soft_threshold(s.x + s.lambda / s.mu, nn.lambda_nn / s.mu);
    } catch (const SvdError& e) {
      throw e.at_iteration(s.k + 1);
    }
    const Matrix denom = two_omega.array() + s.mu;
    Matrix x = (two_m + s.mu * s.y - s.lambda).cwiseQuotient(denom);
    // The estimate is Y, so convergence is judged on Y.
    const double rel = detail::relative_change(s.y, y_prev);
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
    s.mu = std::min(nn.rho * s.mu, nn.mu_max);

    if (opts.multiplier_tol && lambda_norm < *opts.multiplier_tol) {
      result.converged = StopReason::MultiplierNorm;
      break;
    }
    // While lambda_nn / mu exceeds sigma_1 the thresholded iterate is exactly
    // zero; that is not convergence.
    if (opts.stop_on_rel_change && rel < opts.tol && !s.y.isZero(0.0)) {
      result.converged = StopReason::RelChange;
      break;
    }
  }

  result.x_hat = std::move(s.y);
  result.iterations = s.k;
  result.mu = s.mu;
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace lowrank
