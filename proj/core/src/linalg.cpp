#include "lowrank/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace lowrank {

namespace {

struct GramEigen {
  Vector values;   // descending
  Matrix vectors;  // matching columns
};

// Symmetric Gram matrix of the short side: z^T z when rows >= cols, else z z^T.
Matrix short_side_gram(const Matrix& z) {
  const bool tall = z.rows() >= z.cols();
  const Index k = tall ? z.cols() : z.rows();
  Matrix g = Matrix::Zero(k, k);
  if (tall) {
    g.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
  } else {
    g.selfadjointView<Eigen::Lower>().rankUpdate(z);
  }
  return g;
}

// Wraps LAPACK dsyevr on the lower triangle of g. Either the `count` largest
// eigenpairs (count > 0) or every eigenpair with eigenvalue > lower_bound.
GramEigen gram_eigenpairs(Matrix g, Index count, double lower_bound) {
  const auto n = static_cast<lapack_int>(g.rows());
  lapack_int found = 0;
  Vector w(n);
  Matrix vecs(n, count > 0 ? count : n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max<lapack_int>(n, 1)));
  const double abstol = LAPACKE_dlamch('S');

  lapack_int info = 0;
  if (count > 0) {
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, g.data(), n, 0.0, 0.0,
                          n - static_cast<lapack_int>(count) + 1, n, abstol, &found, w.data(),
                          vecs.data(), n, support.data());
  } else {
    const double upper = 2.0 * g.trace() + 1.0;
    if (!(upper > lower_bound)) {
      return {Vector(0), Matrix(n, 0)};
    }
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'V', 'L', n, g.data(), n, lower_bound, upper,
                          0, 0, abstol, &found, w.data(), vecs.data(), n, support.data());
  }
  if (info != 0) {
    throw SvdError("symmetric eigensolver (dsyevr) failed, info=" + std::to_string(info),
                   static_cast<int>(info));
  }

  GramEigen out{Vector(found), Matrix(n, found)};
  for (lapack_int i = 0; i < found; ++i) {
    out.values(i) = w(found - 1 - i);
    out.vectors.col(i) = vecs.col(found - 1 - i);
  }
  return out;
}

// Orthonormal basis for the columns of w with column i parallel to w.col(i)
// whenever that column is not negligible.
Matrix orthonormal_columns(const Matrix& w) {
  Eigen::HouseholderQR<Matrix> qr(w);
  Matrix q = qr.householderQ() * Matrix::Identity(w.rows(), w.cols());
  const auto& r = qr.matrixQR();
  for (Index i = 0; i < w.cols(); ++i) {
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  }
  return q;
}

struct Partial {
  Matrix mapped;  // z * v (tall) or z^T * u (wide): singular vectors scaled by sigma
  Matrix basis;   // Gram eigenvectors: v (tall) or u (wide)
  bool tall;
};

Partial partial_decomposition(const Matrix& z, Index count, double lower_bound) {
  const bool tall = z.rows() >= z.cols();
  GramEigen eig = gram_eigenpairs(short_side_gram(z), count, lower_bound);
  Matrix mapped = tall ? Matrix(z * eig.vectors) : Matrix(z.transpose() * eig.vectors);
  return {std::move(mapped), std::move(eig.vectors), tall};
}

SvdFactors factors_from_partial(const Partial& p) {
  const Index k = p.basis.cols();
  Vector sigma(k);
  for (Index i = 0; i < k; ++i) sigma(i) = p.mapped.col(i).norm();

  // Column norms are more accurate than sqrt(eigenvalue) for small singular
  // values, but can break exact ordering on near-ties.
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return sigma(a) > sigma(b); });

  Matrix mapped(p.mapped.rows(), k);
  Matrix basis(p.basis.rows(), k);
  Vector sorted(k);
  for (Index i = 0; i < k; ++i) {
    const auto src = order[static_cast<std::size_t>(i)];
    mapped.col(i) = p.mapped.col(src);
    basis.col(i) = p.basis.col(src);
    sorted(i) = sigma(src);
  }

  Matrix other = orthonormal_columns(mapped);
  if (p.tall) return {std::move(other), std::move(sorted), std::move(basis)};
  return {std::move(basis), std::move(sorted), std::move(other)};
}

void require_rank(const Matrix& z, Index r) {
  const Index k = std::min(z.rows(), z.cols());
  if (r < 1 || r > k) {
    throw ParameterError("rank " + std::to_string(r) + " outside [1, " + std::to_string(k) +
                         "]");
  }
}

}  // namespace

Matrix SvdFactors::reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }

bool all_finite(const Matrix& a) { return a.allFinite(); }

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw ParameterError(std::string(what) + " has non-finite entries");
}

double frobenius_norm(const Matrix& a) { return a.norm(); }

double inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ParameterError("inner product of differently shaped matrices");
  }
  return a.cwiseProduct(b).sum();
}

SvdFactors svd_full(const Matrix& a) {
  if (a.size() == 0) throw ParameterError("svd of an empty matrix");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw SvdError("bidiagonal SVD did not converge", static_cast<int>(svd.info()));
  }
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

SvdFactors leading_singular_triplets(const Matrix& z, Index r) {
  require_rank(z, r);
  return factors_from_partial(partial_decomposition(z, r, 0.0));
}

SvdFactors truncated_svd_factors(const Matrix& z, Index r) {
  return leading_singular_triplets(z, r);
}

Matrix truncated_svd_project(const Matrix& z, Index r) {
  require_rank(z, r);
  const Partial p = partial_decomposition(z, r, 0.0);
  // Projecting onto the span of the Gram eigenvectors avoids dividing by
  // small singular values.
  if (p.tall) return p.mapped * p.basis.transpose();
  return p.basis * p.mapped.transpose();
}

Matrix svt_soft_threshold(const Matrix& z, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("svt threshold must be nonnegative");
  if (tau == 0.0) return z;
  const Partial p = partial_decomposition(z, 0, tau * tau);
  if (p.basis.cols() == 0) return Matrix::Zero(z.rows(), z.cols());

  Vector shrink(p.basis.cols());
  for (Index i = 0; i < shrink.size(); ++i) {
    const double s = p.mapped.col(i).norm();
    shrink(i) = s > tau ? (s - tau) / s : 0.0;
  }
  if (p.tall) return p.mapped * shrink.asDiagonal() * p.basis.transpose();
  return p.basis * shrink.asDiagonal() * p.mapped.transpose();
}

Vector vectorize(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvectorize(const Vector& v, Index rows, Index cols) {
  if (rows < 1 || cols < 1 || v.size() != rows * cols) {
    throw ParameterError("unvectorize: length " + std::to_string(v.size()) + " does not match " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace lowrank
