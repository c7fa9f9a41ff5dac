#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lowrank {

/// Dense real matrix. Eigen storage is column-major, which coincides with
/// the column-stacking `vec` convention used throughout the solvers.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when an argument violates a documented precondition.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an SVD / symmetric eigensolver kernel fails to converge.
/// `iteration` is the solver iteration that triggered the failure, or -1 when
/// the decomposition was requested outside an iterative solver.
class SvdError : public std::runtime_error {
 public:
  SvdError(const std::string& what, int kernel_info, int iteration = -1)
      : std::runtime_error(what), kernel_info_(kernel_info), iteration_(iteration) {}

  int kernel_info() const noexcept { return kernel_info_; }
  int iteration() const noexcept { return iteration_; }

  SvdError at_iteration(int k) const {
    return SvdError(std::string(what()) + " (solver iteration " + std::to_string(k) + ")",
                    kernel_info_, k);
  }

 private:
  int kernel_info_;
  int iteration_;
};

/// Thin singular value decomposition a = u * diag(sigma) * v^T.
/// sigma is nonincreasing and nonnegative; u and v have orthonormal columns.
struct SvdFactors {
  Matrix u;
  Vector sigma;
  Matrix v;

  Matrix reconstruct() const;
};

bool all_finite(const Matrix& a);
void require_finite(const Matrix& a, const char* what);

double frobenius_norm(const Matrix& a);
double inner(const Matrix& a, const Matrix& b);

/// Full thin SVD (k = min(m, n) triplets) via divide-and-conquer bidiagonal SVD.
SvdFactors svd_full(const Matrix& a);

/// Leading `r` singular triplets of z.
///
/// Computed from the smaller Gram matrix (z^T z or z z^T) with a LAPACK
/// eigensolver restricted to the top `r` eigenpairs, then mapped back through
/// z. The returned u is re-orthonormalized by a thin QR so that it stays
/// orthonormal even for vanishing singular values.
SvdFactors leading_singular_triplets(const Matrix& z, Index r);

/// Frobenius-nearest matrix of rank at most r: U * Sigma_r * V^T.
Matrix truncated_svd_project(const Matrix& z, Index r);

/// Same projection, also returning the retained factors.
SvdFactors truncated_svd_factors(const Matrix& z, Index r);

/// Singular value soft-thresholding: U * diag(max(sigma_i - tau, 0)) * V^T.
/// Only singular values above tau are computed.
Matrix svt_soft_threshold(const Matrix& z, double tau);

/// Column-stacking vectorization.
Vector vectorize(const Matrix& x);
Matrix unvectorize(const Vector& v, Index rows, Index cols);

}  // namespace lowrank
