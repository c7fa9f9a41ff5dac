#pragma once

#include "lowrank/linalg.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

namespace lowrank {

/// Observed cell of a sampling pattern (zero-based row, column).
struct Cell {
  Index row;
  Index col;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Ordered set of distinct observed cells of an m x n matrix.
class SamplingPattern {
 public:
  SamplingPattern(Index rows, Index cols, std::vector<Cell> observed);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index size() const noexcept { return static_cast<Index>(observed_.size()); }
  const std::vector<Cell>& observed() const noexcept { return observed_; }

  /// 0/1 location matrix.
  Matrix mask() const;

 private:
  Index rows_;
  Index cols_;
  std::vector<Cell> observed_;
};

/// Linear map X -> (<A_1, X>, ..., <A_d, X>).
///
/// The general variant stores the stacked matrix whose i-th column is
/// vec(A_i) (mn x d). The sampling variant never materializes it.
class MeasurementOperator {
 public:
  struct General {
    Matrix stacked;  // mn x d
  };
  struct Sampling {
    SamplingPattern pattern;
  };

  /// All matrices must share a shape; none may be zero.
  static MeasurementOperator general(const std::vector<Matrix>& mats);
  /// Takes the mn x d stacked matrix directly.
  static MeasurementOperator general_stacked(Index rows, Index cols, Matrix stacked);
  static MeasurementOperator sampling(SamplingPattern pattern);

  /// Materializes the unit-entry matrices of a sampling operator as a
  /// general operator (cross-validation of the general code path).
  MeasurementOperator to_general() const;

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index measurements() const noexcept { return d_; }

  bool is_sampling() const noexcept { return std::holds_alternative<Sampling>(repr_); }
  const SamplingPattern& pattern() const;
  const Matrix& stacked() const;

  Vector apply(const Matrix& x) const;
  Matrix adjoint(const Vector& w) const;

  /// 2 * sum_i ||A_i||_F^2, the gradient Lipschitz constant of ||A(X) - b||^2.
  double lipschitz_constant() const;

 private:
  MeasurementOperator(Index rows, Index cols, Index d, std::variant<General, Sampling> repr)
      : rows_(rows), cols_(cols), d_(d), repr_(std::move(repr)) {}

  Index rows_;
  Index cols_;
  Index d_;
  std::variant<General, Sampling> repr_;
};

/// M with the measurements scattered onto the observed cells, zero elsewhere.
Matrix embed_measurements(const SamplingPattern& pattern, const Vector& b);

/// Cached solver for (2 A* A + mu I)(X) = rhs on a general operator.
///
/// With the Woodbury path only the d x d matrix I_d + (2/mu) S^T S is factored
/// (S = stacked operator); otherwise the mn x mn matrix 2 S S^T + mu I is.
/// Both are symmetric positive definite for mu > 0. The factorization is done
/// once at construction and reused by every solve.
class NormalEquationSolver {
 public:
  NormalEquationSolver(const MeasurementOperator& op, double mu, bool use_smw);

  double mu() const noexcept { return mu_; }
  bool uses_smw() const noexcept { return use_smw_; }
  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }

  Matrix solve(const Matrix& rhs) const;

  /// Applies 2 A* A + mu I (used to check residuals).
  Matrix forward(const Matrix& x) const;

  /// Process-wide count of factorizations performed.
  static std::uint64_t factorization_count() noexcept;

 private:
  Index rows_;
  Index cols_;
  double mu_;
  bool use_smw_;
  Matrix stacked_;
  Eigen::LLT<Matrix> factor_;
};

/// Woodbury is chosen by default whenever d < mn.
NormalEquationSolver build_normal_solver(const MeasurementOperator& op, double mu);
NormalEquationSolver build_normal_solver(const MeasurementOperator& op, double mu, bool use_smw);

inline Matrix solve_normal_equation(const NormalEquationSolver& solver, const Matrix& rhs) {
  return solver.solve(rhs);
}

}  // namespace lowrank
