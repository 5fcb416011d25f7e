#include "doctest.h"

#include <cmath>
#include <vector>

#include "core/jacobi.hpp"
#include "core/quadrature.hpp"
#include "core/rng.hpp"

using namespace msplab;

TEST_CASE("hermite rule reproduces gaussian moments") {
  QuadratureRule q = hermite_rule(21);
  REQUIRE(q.size() == 21);
  double w = 0.0, m1 = 0.0, m2 = 0.0, m4 = 0.0, m6 = 0.0;
  for (int i = 0; i < q.size(); ++i) {
    w += q.w[i];
    m1 += q.w[i] * q.x[i];
    m2 += q.w[i] * q.x[i] * q.x[i];
    m4 += q.w[i] * std::pow(q.x[i], 4);
    m6 += q.w[i] * std::pow(q.x[i], 6);
  }
  CHECK(std::fabs(w - 1.0) < 1e-13);
  CHECK(std::fabs(m1) < 1e-14);
  CHECK(std::fabs(m2 - 1.0) < 1e-12);
  CHECK(std::fabs(m4 - 3.0) < 1e-11);
  CHECK(std::fabs(m6 - 15.0) < 1e-10);
}

TEST_CASE("hermite rule integrates the gaussian mgf") {
  QuadratureRule q = hermite_rule(21);
  const double t = 0.7;
  const double got = expect(q, [&](double g) { return std::exp(t * g); });
  CHECK(std::fabs(got - std::exp(0.5 * t * t)) < 1e-10);
}

TEST_CASE("legendre rule reproduces uniform moments") {
  QuadratureRule q = legendre_rule(64);
  REQUIRE(q.size() == 64);
  double w = 0.0;
  for (double wi : q.w) w += wi;
  CHECK(std::fabs(w - 1.0) < 1e-13);
  auto mom = [&](int k) { return expect(q, [&](double a) { return std::pow(a, k); }); };
  CHECK(std::fabs(mom(1)) < 1e-14);
  CHECK(std::fabs(mom(2) - 1.0 / 3.0) < 1e-12);
  CHECK(std::fabs(mom(4) - 1.0 / 5.0) < 1e-12);
  CHECK(std::fabs(mom(20) - 1.0 / 21.0) < 1e-12);
}

TEST_CASE("legendre nodes are symmetric and inside (-1,1)") {
  QuadratureRule q = legendre_rule(32);
  for (int i = 0; i < q.size(); ++i) {
    CHECK(q.x[i] > -1.0);
    CHECK(q.x[i] < 1.0);
    CHECK(std::fabs(q.x[i] + q.x[q.size() - 1 - i]) < 1e-13);
  }
}

TEST_CASE("jacobi eigen solves the 3x3 tridiagonal exactly") {
  // eigenvalues of tridiag(1,2,1) are 2 - sqrt 2, 2, 2 + sqrt 2
  std::vector<double> A = {2, 1, 0, 1, 2, 1, 0, 1, 2};
  EigenResult e = jacobi_eigen(A, 3);
  REQUIRE(e.values.size() == 3);
  const double r2 = std::sqrt(2.0);
  CHECK(std::fabs(e.values[0] - (2.0 - r2)) < 1e-13);
  CHECK(std::fabs(e.values[1] - 2.0) < 1e-13);
  CHECK(std::fabs(e.values[2] - (2.0 + r2)) < 1e-13);
}

TEST_CASE("jacobi eigen factorization on a random symmetric matrix") {
  const int n = 8;
  Rng rng(101, "test-eigen");
  std::vector<double> A(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      A[i * n + j] = v;
      A[j * n + i] = v;
    }
  EigenResult e = jacobi_eigen(A, n);

  double trace = 0.0, frob2 = 0.0, lam_sum = 0.0, lam2_sum = 0.0;
  for (int i = 0; i < n; ++i) trace += A[i * n + i];
  for (double v : A) frob2 += v * v;
  for (double l : e.values) {
    lam_sum += l;
    lam2_sum += l * l;
  }
  CHECK(std::fabs(trace - lam_sum) < 1e-12);
  CHECK(std::fabs(frob2 - lam2_sum) < 1e-11);
  for (std::size_t i = 1; i < e.values.size(); ++i) CHECK(e.values[i - 1] <= e.values[i]);

  // columns are orthonormal eigenvectors
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l <= k; ++l) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += e.vectors[i + n * k] * e.vectors[i + n * l];
      CHECK(std::fabs(dot - (k == l ? 1.0 : 0.0)) < 1e-12);
    }
    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
      double av = 0.0;
      for (int j = 0; j < n; ++j) av += A[i * n + j] * e.vectors[j + n * k];
      resid = std::max(resid, std::fabs(av - e.values[k] * e.vectors[i + n * k]));
    }
    CHECK(resid < 1e-11);
  }
}

TEST_CASE("jacobi eigen rejects asymmetric input") {
  std::vector<double> A = {1, 2, 0, 1};
  CHECK(!is_symmetric(A, 2));
  CHECK_THROWS(jacobi_eigen(A, 2));
}

TEST_CASE("one-sided svd agrees with the eigensolver on B^T B") {
  const int rows = 6, cols = 4;
  Rng rng(102, "test-svd");
  std::vector<double> B(rows * cols);
  for (double& v : B) v = rng.uniform(-1.0, 1.0);
  SvdResult s = one_sided_jacobi_svd(B, rows, cols);
  REQUIRE(static_cast<int>(s.singular.size()) == cols);

  std::vector<double> BtB(cols * cols, 0.0);
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int r = 0; r < rows; ++r) acc += B[r * cols + i] * B[r * cols + j];
      BtB[i * cols + j] = acc;
    }
  EigenResult e = jacobi_eigen(BtB, cols);
  for (int k = 0; k < cols; ++k)
    CHECK(std::fabs(s.singular[k] * s.singular[k] - e.values[k]) <
          1e-10 * std::max(1.0, e.values[k]));

  // right singular vectors orthonormal
  for (int k = 0; k < cols; ++k)
    for (int l = 0; l <= k; ++l) {
      double dot = 0.0;
      for (int i = 0; i < cols; ++i) dot += s.v[i + cols * k] * s.v[i + cols * l];
      CHECK(std::fabs(dot - (k == l ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("one-sided svd keeps relative accuracy on graded columns") {
  // columns scaled by 1, 1e-8: tiny singular value must come out exact
  std::vector<double> B = {1.0, 0.0, 0.0, 1e-8, 0.0, 0.0, 0.0, 0.0};
  SvdResult s = one_sided_jacobi_svd(B, 4, 2);
  CHECK(std::fabs(s.singular[0] - 1e-8) < 1e-20);
  CHECK(std::fabs(s.singular[1] - 1.0) < 1e-14);
}
