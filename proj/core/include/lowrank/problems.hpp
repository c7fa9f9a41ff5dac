#pragma once

#include "lowrank/linalg.hpp"
#include "lowrank/operators.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace lowrank {

struct NoiseInfo {
  Vector e;      // additive measurement noise
  double snr_m;  // dB, 20 log10(||b_clean|| / ||e||)
};

/// Observed data b = A(X) + e plus whatever generation metadata is known.
struct ProblemInstance {
  std::optional<Matrix> x_true;
  MeasurementOperator op;
  Vector b;
  std::optional<NoiseInfo> noise;
  std::optional<Index> r_true;

  Index rows() const noexcept { return op.rows(); }
  Index cols() const noexcept { return op.cols(); }
  Index measurements() const noexcept { return op.measurements(); }

  /// Throws ParameterError when |b| != d or b has non-finite entries.
  void validate() const;
};

/// Deterministic 64-bit mixing used to derive independent per-task seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

using Rng = std::mt19937_64;

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// Noisy vector b_clean + e with e = s * g, g iid N(0, 1), scaled so that the
/// realized 20 log10(||b_clean|| / ||e||) equals snr_m exactly.
/// An infinite snr_m yields e = 0.
struct NoisyMeasurements {
  Vector b;
  Vector e;
};
NoisyMeasurements calibrate_noise(const Vector& b_clean, double snr_m, std::uint64_t seed);

/// Matrix completion instance: X = B C^T with B (m x r), C (n x r) iid N(0, 1),
/// d cells sampled uniformly without replacement, optional calibrated noise.
ProblemInstance generate_instance(Index m, Index n, Index r_true, Index d,
                                  std::optional<double> snr_m, std::uint64_t seed);

/// Matrix sensing instance with d dense iid N(0, 1) measurement matrices.
ProblemInstance generate_sensing_instance(Index m, Index n, Index r_true, Index d,
                                          std::optional<double> snr_m, std::uint64_t seed);

/// 20 log10(||X|| / ||X - X_hat||) in dB, capped at kSnrCap.
inline constexpr double kSnrCap = 300.0;
double snr_reconstruction(const Matrix& x_true, const Matrix& x_hat);

/// min(n^2, scale_c * ceil(n^1.2 * r * log10 n)).
Index sufficient_samples(Index n, Index r, double scale_c = 1.0);

}  // namespace lowrank
