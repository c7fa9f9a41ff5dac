#include "lowrank/operators.hpp"

#include <atomic>
#include <string>
#include <unordered_set>

namespace lowrank {

namespace {

std::atomic<std::uint64_t> g_factorizations{0};

std::string shape_str(Index r, Index c) { return std::to_string(r) + "x" + std::to_string(c); }

}  // namespace

SamplingPattern::SamplingPattern(Index rows, Index cols, std::vector<Cell> observed)
    : rows_(rows), cols_(cols), observed_(std::move(observed)) {
  if (rows < 1 || cols < 1) throw ParameterError("sampling pattern needs positive dimensions");
  if (observed_.empty()) throw ParameterError("sampling pattern must observe at least one cell");
  if (static_cast<Index>(observed_.size()) > rows * cols) {
    throw ParameterError("sampling pattern has more cells than the matrix");
  }
  std::unordered_set<Index> seen;
  seen.reserve(observed_.size());
  for (const Cell& c : observed_) {
    if (c.row < 0 || c.row >= rows || c.col < 0 || c.col >= cols) {
      throw ParameterError("observed cell (" + std::to_string(c.row) + ", " +
                           std::to_string(c.col) + ") outside " + shape_str(rows, cols));
    }
    if (!seen.insert(c.col * rows + c.row).second) {
      throw ParameterError("observed cell (" + std::to_string(c.row) + ", " +
                           std::to_string(c.col) + ") repeated");
    }
  }
}

Matrix SamplingPattern::mask() const {
  Matrix omega = Matrix::Zero(rows_, cols_);
  for (const Cell& c : observed_) omega(c.row, c.col) = 1.0;
  return omega;
}

MeasurementOperator MeasurementOperator::general(const std::vector<Matrix>& mats) {
  if (mats.empty()) throw ParameterError("general operator needs at least one matrix");
  const Index m = mats.front().rows();
  const Index n = mats.front().cols();
  Matrix stacked(m * n, static_cast<Index>(mats.size()));
  for (std::size_t i = 0; i < mats.size(); ++i) {
    if (mats[i].rows() != m || mats[i].cols() != n) {
      throw ParameterError("measurement matrix " + std::to_string(i) + " is " +
                           shape_str(mats[i].rows(), mats[i].cols()) + ", expected " +
                           shape_str(m, n));
    }
    stacked.col(static_cast<Index>(i)) = vectorize(mats[i]);
  }
  return general_stacked(m, n, std::move(stacked));
}

MeasurementOperator MeasurementOperator::general_stacked(Index rows, Index cols, Matrix stacked) {
  if (rows < 1 || cols < 1 || stacked.rows() != rows * cols || stacked.cols() < 1) {
    throw ParameterError("stacked operator shape does not match " + shape_str(rows, cols));
  }
  require_finite(stacked, "measurement operator");
  for (Index i = 0; i < stacked.cols(); ++i) {
    if (stacked.col(i).squaredNorm() == 0.0) {
      throw ParameterError("measurement matrix " + std::to_string(i) + " is zero");
    }
  }
  const Index d = stacked.cols();
  return MeasurementOperator(rows, cols, d, General{std::move(stacked)});
}

MeasurementOperator MeasurementOperator::sampling(SamplingPattern pattern) {
  const Index m = pattern.rows();
  const Index n = pattern.cols();
  const Index d = pattern.size();
  return MeasurementOperator(m, n, d, Sampling{std::move(pattern)});
}

MeasurementOperator MeasurementOperator::to_general() const {
  if (!is_sampling()) return *this;
  Matrix stacked = Matrix::Zero(rows_ * cols_, d_);
  const auto& cells = pattern().observed();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    stacked(cells[i].col * rows_ + cells[i].row, static_cast<Index>(i)) = 1.0;
  }
  return MeasurementOperator(rows_, cols_, d_, General{std::move(stacked)});
}

const SamplingPattern& MeasurementOperator::pattern() const {
  if (const auto* s = std::get_if<Sampling>(&repr_)) return s->pattern;
  throw ParameterError("operator is not a sampling operator");
}

const Matrix& MeasurementOperator::stacked() const {
  if (const auto* g = std::get_if<General>(&repr_)) return g->stacked;
  throw ParameterError("operator is not a general operator");
}

Vector MeasurementOperator::apply(const Matrix& x) const {
  if (x.rows() != rows_ || x.cols() != cols_) {
    throw ParameterError("apply: got " + shape_str(x.rows(), x.cols()) + ", operator acts on " +
                         shape_str(rows_, cols_));
  }
  if (const auto* s = std::get_if<Sampling>(&repr_)) {
    Vector out(d_);
    const auto& cells = s->pattern.observed();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out(static_cast<Index>(i)) = x(cells[i].row, cells[i].col);
    }
    return out;
  }
  return std::get<General>(repr_).stacked.transpose() * vectorize(x);
}

Matrix MeasurementOperator::adjoint(const Vector& w) const {
  if (w.size() != d_) {
    throw ParameterError("adjoint: got " + std::to_string(w.size()) + " weights, expected " +
                         std::to_string(d_));
  }
  if (const auto* s = std::get_if<Sampling>(&repr_)) return embed_measurements(s->pattern, w);
  return unvectorize(std::get<General>(repr_).stacked * w, rows_, cols_);
}

double MeasurementOperator::lipschitz_constant() const {
  if (is_sampling()) return 2.0 * static_cast<double>(d_);
  return 2.0 * std::get<General>(repr_).stacked.squaredNorm();
}

Matrix embed_measurements(const SamplingPattern& pattern, const Vector& b) {
  if (b.size() != pattern.size()) {
    throw ParameterError("embed: got " + std::to_string(b.size()) + " values for " +
                         std::to_string(pattern.size()) + " observed cells");
  }
  Matrix out = Matrix::Zero(pattern.rows(), pattern.cols());
  const auto& cells = pattern.observed();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out(cells[i].row, cells[i].col) = b(static_cast<Index>(i));
  }
  return out;
}

NormalEquationSolver::NormalEquationSolver(const MeasurementOperator& op, double mu, bool use_smw)
    : rows_(op.rows()), cols_(op.cols()), mu_(mu), use_smw_(use_smw) {
  if (!(mu > 0.0)) throw ParameterError("penalty mu must be positive");
  if (op.is_sampling()) {
    throw ParameterError(
        "normal-equation solver needs a general operator; sampling operators use the "
        "elementwise completion update");
  }
  stacked_ = op.stacked();
  const Index d = stacked_.cols();
  if (use_smw_) {
    Matrix inner = Matrix::Identity(d, d);
    inner.selfadjointView<Eigen::Lower>().rankUpdate(stacked_.transpose(), 2.0 / mu_);
    factor_.compute(inner);
  } else {
    Matrix full = Matrix::Identity(rows_ * cols_, rows_ * cols_) * mu_;
    full.selfadjointView<Eigen::Lower>().rankUpdate(stacked_, 2.0);
    factor_.compute(full);
  }
  // SPD for every mu > 0; a failure here means non-finite input slipped in.
  if (factor_.info() != Eigen::Success) {
    throw std::logic_error("normal-equation factorization failed");
  }
  g_factorizations.fetch_add(1, std::memory_order_relaxed);
}

Matrix NormalEquationSolver::solve(const Matrix& rhs) const {
  if (rhs.rows() != rows_ || rhs.cols() != cols_) {
    throw ParameterError("normal equation rhs is " + shape_str(rhs.rows(), rhs.cols()) +
                         ", expected " + shape_str(rows_, cols_));
  }
  const Vector v = vectorize(rhs);
  if (!use_smw_) return unvectorize(factor_.solve(v), rows_, cols_);
  // (2 S S^T + mu I)^{-1} = I/mu - (2/mu^2) S (I + (2/mu) S^T S)^{-1} S^T
  const Vector t = factor_.solve(stacked_.transpose() * v);
  const Vector x = v / mu_ - (2.0 / (mu_ * mu_)) * (stacked_ * t);
  return unvectorize(x, rows_, cols_);
}

Matrix NormalEquationSolver::forward(const Matrix& x) const {
  const Vector v = vectorize(x);
  const Vector y = 2.0 * (stacked_ * (stacked_.transpose() * v)) + mu_ * v;
  return unvectorize(y, rows_, cols_);
}

std::uint64_t NormalEquationSolver::factorization_count() noexcept {
  return g_factorizations.load(std::memory_order_relaxed);
}

NormalEquationSolver build_normal_solver(const MeasurementOperator& op, double mu) {
  return NormalEquationSolver(op, mu, op.measurements() < op.rows() * op.cols());
}

NormalEquationSolver build_normal_solver(const MeasurementOperator& op, double mu, bool use_smw) {
  return NormalEquationSolver(op, mu, use_smw);
}

}  // namespace lowrank
