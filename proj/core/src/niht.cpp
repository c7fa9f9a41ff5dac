#include "lowrank/solvers.hpp"

#include <chrono>
#include <limits>

namespace lowrank {

// Normalized IHT for completion. The step size is the exact line-search step
// for the gradient restricted to the current column space:
//   alpha = ||P_U g||^2 / ||Omega .* P_U g||^2,  g = M - Omega .* X.
SolverResult niht(const ProblemInstance& instance, const SolverOptions& opts) {
  if (!instance.op.is_sampling()) throw ParameterError("niht needs a sampling operator");
  instance.validate();
  detail::validate_options(opts, instance.rows(), instance.cols());

  const auto start = std::chrono::steady_clock::now();
  const Index m = instance.rows();
  const Index n = instance.cols();
  const SamplingPattern& pattern = instance.op.pattern();
  const Matrix meas = embed_measurements(pattern, instance.b);
  const Matrix omega = pattern.mask();

  Matrix x = opts.x0 ? *opts.x0 : Matrix::Zero(m, n);
  Matrix u;  // leading left singular vectors of x; empty until known
  if (opts.x0 && opts.x0->norm() > 0.0) u = leading_singular_triplets(x, opts.rank).u;

  SolverResult result;
  if (opts.record_trace) result.trace.reserve(static_cast<std::size_t>(opts.max_iter));
  int k = 0;
  while (k < opts.max_iter) {
    try {
      const Matrix g = meas - omega.cwiseProduct(x);
      if (u.size() == 0) u = leading_singular_triplets(g, opts.rank).u;
      const Matrix pg = u * (u.transpose() * g);
      const double num = pg.squaredNorm();
      const double den = omega.cwiseProduct(pg).squaredNorm();
      const double alpha = den < 1e-14 ? 1.0 : num / den;

      SvdFactors f = truncated_svd_factors(x + alpha * g, opts.rank);
      Matrix next = f.reconstruct();
      const double rel = detail::relative_change(next, x);
      x = std::move(next);
      u = std::move(f.u);
      ++k;

      if (opts.record_trace) {
        std::optional<double> snr;
        if (instance.x_true) snr = snr_reconstruction(*instance.x_true, x);
        result.trace.push_back({rel, std::numeric_limits<double>::quiet_NaN(), snr});
      }
      if (opts.stop_on_rel_change && rel < opts.tol) {
        result.converged = StopReason::RelChange;
        break;
      }
    } catch (const SvdError& e) {
      throw e.at_iteration(k + 1);
    }
  }

  result.x_hat = std::move(x);
  result.iterations = k;
  result.mu = 0.0;
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace lowrank
