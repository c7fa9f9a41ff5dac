#include "lowrank/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lowrank {

namespace {

void require_dims(Index m, Index n, Index r_true, Index d) {
  if (m < 1 || n < 1) throw ParameterError("matrix dimensions must be positive");
  if (r_true < 1 || r_true > std::min(m, n)) {
    throw ParameterError("true rank " + std::to_string(r_true) + " outside [1, " +
                         std::to_string(std::min(m, n)) + "]");
  }
  if (d < 1 || d > m * n) {
    throw ParameterError("measurement count " + std::to_string(d) + " outside [1, " +
                         std::to_string(m * n) + "]");
  }
}

Matrix low_rank_truth(Index m, Index n, Index r, Rng& rng) {
  const Matrix b = gaussian_matrix(m, r, rng);
  const Matrix c = gaussian_matrix(n, r, rng);
  return b * c.transpose();
}

void attach_noise(ProblemInstance& inst, std::optional<double> snr_m, std::uint64_t seed) {
  if (!snr_m) return;
  NoisyMeasurements noisy = calibrate_noise(inst.b, *snr_m, mix_seed(seed, 0x6e6f697365ULL));
  inst.b = std::move(noisy.b);
  inst.noise = NoiseInfo{std::move(noisy.e), *snr_m};
}

}  // namespace

void ProblemInstance::validate() const {
  if (b.size() != op.measurements()) {
    throw ParameterError("instance has " + std::to_string(b.size()) + " measurements, operator " +
                         std::to_string(op.measurements()));
  }
  if (!b.allFinite()) throw ParameterError("measurements contain non-finite values");
  if (x_true && (x_true->rows() != op.rows() || x_true->cols() != op.cols())) {
    throw ParameterError("ground truth shape does not match the operator");
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer applied to a chained combination
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  }
  return out;
}

NoisyMeasurements calibrate_noise(const Vector& b_clean, double snr_m, std::uint64_t seed) {
  const double signal = b_clean.norm();
  if (!(signal > 0.0)) throw ParameterError("cannot calibrate noise against a zero signal");
  if (std::isnan(snr_m)) throw ParameterError("snr_m is NaN");
  if (std::isinf(snr_m) && snr_m > 0) return {b_clean, Vector::Zero(b_clean.size())};

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector g(b_clean.size());
  for (Index i = 0; i < g.size(); ++i) g(i) = normal(rng);
  const double scale = signal * std::pow(10.0, -snr_m / 20.0) / g.norm();
  Vector e = scale * g;
  return {b_clean + e, std::move(e)};
}

ProblemInstance generate_instance(Index m, Index n, Index r_true, Index d,
                                  std::optional<double> snr_m, std::uint64_t seed) {
  require_dims(m, n, r_true, d);
  Rng rng(seed);
  Matrix x = low_rank_truth(m, n, r_true, rng);

  // Partial Fisher-Yates over column-major cell indices.
  const Index cells = m * n;
  std::vector<Index> idx(static_cast<std::size_t>(cells));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < d; ++i) {
    std::uniform_int_distribution<Index> pick(i, cells - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(d));
  std::sort(idx.begin(), idx.end());

  std::vector<Cell> observed;
  observed.reserve(idx.size());
  for (Index lin : idx) observed.push_back({lin % m, lin / m});

  auto op = MeasurementOperator::sampling(SamplingPattern(m, n, std::move(observed)));
  Vector b = op.apply(x);
  ProblemInstance inst{std::move(x), std::move(op), std::move(b), std::nullopt, r_true};
  attach_noise(inst, snr_m, seed);
  return inst;
}

ProblemInstance generate_sensing_instance(Index m, Index n, Index r_true, Index d,
                                          std::optional<double> snr_m, std::uint64_t seed) {
  require_dims(m, n, r_true, d);
  Rng rng(seed);
  Matrix x = low_rank_truth(m, n, r_true, rng);
  auto op = MeasurementOperator::general_stacked(m, n, gaussian_matrix(m * n, d, rng));
  Vector b = op.apply(x);
  ProblemInstance inst{std::move(x), std::move(op), std::move(b), std::nullopt, r_true};
  attach_noise(inst, snr_m, seed);
  return inst;
}

double snr_reconstruction(const Matrix& x_true, const Matrix& x_hat) {
  if (x_true.rows() != x_hat.rows() || x_true.cols() != x_hat.cols()) {
    throw ParameterError("snr: shape mismatch");
  }
  const double signal = x_true.norm();
  if (!(signal > 0.0)) throw ParameterError("snr: ground truth is zero");
  const double err = (x_true - x_hat).norm();
  if (err <= 1e-300 * signal) return kSnrCap;
  return std::min(kSnrCap, 20.0 * std::log10(signal / err));
}

Index sufficient_samples(Index n, Index r, double scale_c) {
  if (n < 2) throw ParameterError("sufficient_samples needs n >= 2");
  if (r < 1) throw ParameterError("sufficient_samples needs r >= 1");
  if (!(scale_c > 0.0)) throw ParameterError("scale_c must be positive");
  const double nd = static_cast<double>(n);
  const double raw = std::ceil(std::pow(nd, 1.2) * static_cast<double>(r) * std::log10(nd));
  const double scaled = std::ceil(scale_c * raw);
  const double cap = nd * nd;
  return static_cast<Index>(std::min(cap, scaled));
}

}  // namespace lowrank
