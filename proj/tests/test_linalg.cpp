#include "lowrank/linalg.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace lowrank;

namespace {

Matrix diag3(double a, double b, double c) {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = a;
  d(1, 1) = b;
  d(2, 2) = c;
  return d;
}

void check_svd_invariants(const Matrix& a, const SvdFactors& f) {
  const Index k = std::min(a.rows(), a.cols());
  REQUIRE(f.sigma.size() == k);
  CHECK((f.u.transpose() * f.u - Matrix::Identity(k, k)).norm() <= 1e-10);
  CHECK((f.v.transpose() * f.v - Matrix::Identity(k, k)).norm() <= 1e-10);
  for (Index i = 0; i < k; ++i) {
    CHECK(f.sigma(i) >= 0.0);
    if (i > 0) CHECK(f.sigma(i) <= f.sigma(i - 1));
  }
  CHECK((f.reconstruct() - a).norm() <= 1e-10 * std::max(1.0, a.norm()));
}

}  // namespace

TEST_CASE("svd_full on a diagonal matrix") {
  const SvdFactors f = svd_full(diag3(3, 2, 1));
  CHECK(f.sigma(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(f.sigma(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.sigma(2) == doctest::Approx(1.0).epsilon(1e-14));
  // identity up to column sign
  CHECK((f.u.cwiseAbs() - Matrix::Identity(3, 3)).norm() <= 1e-12);
  CHECK((f.v.cwiseAbs() - Matrix::Identity(3, 3)).norm() <= 1e-12);
}

TEST_CASE("svd_full on the zero matrix") {
  const SvdFactors f = svd_full(Matrix::Zero(2, 3));
  REQUIRE(f.sigma.size() == 2);
  CHECK(f.sigma(0) == 0.0);
  CHECK(f.sigma(1) == 0.0);
}

TEST_CASE("svd_full reconstructs random inputs") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix a = oracle::random_matrix(4, 4, seed);
    check_svd_invariants(a, svd_full(a));
  }
  const Matrix wide = oracle::random_matrix(3, 7, 9);
  check_svd_invariants(wide, svd_full(wide));
}

TEST_CASE("leading triplets satisfy the factor invariants") {
  for (auto [m, n] : {std::pair<Index, Index>{6, 4}, {4, 6}, {5, 5}}) {
    const Matrix z = oracle::random_matrix(m, n, static_cast<std::uint64_t>(m * 10 + n));
    const Index k = std::min(m, n);
    const SvdFactors full = leading_singular_triplets(z, k);
    check_svd_invariants(z, full);
    const SvdFactors top2 = leading_singular_triplets(z, 2);
    const Vector ref = oracle::singular_values(z);
    CHECK(std::abs(top2.sigma(0) - ref(0)) <= 1e-12 * ref(0));
    CHECK(std::abs(top2.sigma(1) - ref(1)) <= 1e-12 * ref(0));
  }
}

TEST_CASE("truncated projection: frozen examples") {
  SUBCASE("diag(3,2,1), r=2") {
    CHECK((truncated_svd_project(diag3(3, 2, 1), 2) - diag3(3, 2, 0)).norm() <= 1e-12);
  }
  SUBCASE("rank-1 input is a fixed point") {
    const Matrix u = oracle::random_matrix(4, 1, 3);
    const Matrix v = oracle::random_matrix(5, 1, 4);
    const Matrix a = u * v.transpose();
    CHECK((truncated_svd_project(a, 1) - a).norm() <= 1e-10 * a.norm());
  }
  SUBCASE("random 5x4, r=2 against manual truncation") {
    const Matrix z = oracle::random_matrix(5, 4, 77);
    CHECK(oracle::rel_diff(truncated_svd_project(z, 2), oracle::svd_truncate(z, 2)) <= 1e-10);
  }
  SUBCASE("wide input") {
    const Matrix z = oracle::random_matrix(3, 8, 78);
    CHECK(oracle::rel_diff(truncated_svd_project(z, 2), oracle::svd_truncate(z, 2)) <= 1e-10);
  }
}

TEST_CASE("truncated projection rejects out-of-range ranks") {
  const Matrix z = oracle::random_matrix(3, 4, 1);
  CHECK_THROWS_AS(truncated_svd_project(z, 0), ParameterError);
  CHECK_THROWS_AS(truncated_svd_project(z, 4), ParameterError);
  CHECK_NOTHROW(truncated_svd_project(z, 3));
}

TEST_CASE("Eckart-Young: projection beats random rank-r candidates") {
  int checks = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const Index m = 3 + static_cast<Index>(trial % 5);
    const Index n = 2 + static_cast<Index>((trial / 5) % 6);
    const Index r = 1 + static_cast<Index>(trial % std::min(m, n));
    const Matrix z = oracle::random_matrix(m, n, 500 + trial);
    const double best = (z - truncated_svd_project(z, r)).norm();
    for (std::uint64_t c = 0; c < 20; ++c) {
      const Matrix cand = oracle::random_rank(m, n, r, 10000 + trial * 100 + c) *
                          (0.1 + 0.1 * static_cast<double>(c % 7));
      CHECK((z - cand).norm() + 1e-9 >= best);
      ++checks;
    }
    // and the oracle's own optimum
    CHECK(best <= (z - oracle::svd_truncate(z, r)).norm() + 1e-9);
  }
  CHECK(checks == 2000);
}

TEST_CASE("projection is idempotent") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix z = oracle::random_matrix(7, 6, 900 + seed);
    const Index r = 1 + static_cast<Index>(seed % 5);
    const Matrix p = truncated_svd_project(z, r);
    CHECK((truncated_svd_project(p, r) - p).norm() <= 1e-10 * std::max(1.0, p.norm()));
  }
}

TEST_CASE("inner product and Frobenius norm agree") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix x = oracle::random_matrix(4, 6, 40 + seed);
    const double n2 = frobenius_norm(x) * frobenius_norm(x);
    CHECK(std::abs(inner(x, x) - n2) <= 1e-12 * n2);
  }
  CHECK_THROWS_AS(inner(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), ParameterError);
}

TEST_CASE("singular value soft-thresholding") {
  SUBCASE("diagonal shrinkage") {
    CHECK((svt_soft_threshold(diag3(3, 2, 1), 1.5) - diag3(1.5, 0.5, 0)).norm() <= 1e-12);
  }
  SUBCASE("tau = 0 reproduces the input") {
    const Matrix z = oracle::random_matrix(4, 3, 5);
    CHECK((svt_soft_threshold(z, 0.0) - z).norm() <= 1e-10);
  }
  SUBCASE("threshold above sigma_1 gives zero") {
    const Matrix z = oracle::random_matrix(3, 3, 6);
    const double s1 = oracle::singular_values(z)(0);
    CHECK(svt_soft_threshold(z, s1 + 1.0).norm() == 0.0);
  }
  SUBCASE("matches shrinkage of the full SVD") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Matrix z = oracle::random_matrix(6, 4 + static_cast<Index>(seed % 4), 60 + seed);
      const double tau = 0.3 + 0.2 * static_cast<double>(seed);
      Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
      Vector s = (svd.singularValues().array() - tau).max(0.0);
      const Matrix ref = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
      CHECK(oracle::rel_diff(svt_soft_threshold(z, tau), ref) <= 1e-10);
    }
  }
  SUBCASE("negative threshold rejected") {
    CHECK_THROWS_AS(svt_soft_threshold(diag3(1, 1, 1), -1.0), ParameterError);
  }
}

TEST_CASE("soft-thresholding is 1-Lipschitz") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix a = oracle::random_matrix(5, 4, 3000 + seed);
    const Matrix b = a + 0.5 * oracle::random_matrix(5, 4, 4000 + seed);
    const double tau = 0.1 * static_cast<double>(seed % 20);
    const double lhs = (svt_soft_threshold(a, tau) - svt_soft_threshold(b, tau)).norm();
    CHECK(lhs <= (a - b).norm() + 1e-9);
  }
}

TEST_CASE("vectorization stacks columns") {
  Matrix x(2, 2);
  x << 1, 2, 3, 4;
  const Vector v = vectorize(x);
  REQUIRE(v.size() == 4);
  CHECK(v(0) == 1);
  CHECK(v(1) == 3);
  CHECK(v(2) == 2);
  CHECK(v(3) == 4);

  const Vector e = vectorize(Matrix::Identity(2, 2));
  CHECK(e(0) == 1);
  CHECK(e(1) == 0);
  CHECK(e(2) == 0);
  CHECK(e(3) == 1);

  const Matrix r = oracle::random_matrix(3, 5, 12);
  CHECK(unvectorize(vectorize(r), 3, 5) == r);
  CHECK_THROWS_AS(unvectorize(Vector::Zero(7), 2, 4), ParameterError);
}

TEST_CASE("non-finite detection") {
  Matrix x = Matrix::Zero(2, 2);
  CHECK(all_finite(x));
  x(1, 0) = std::nan("");
  CHECK_FALSE(all_finite(x));
  CHECK_THROWS_AS(require_finite(x, "x"), ParameterError);
}
