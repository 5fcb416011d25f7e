#include "core/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace msplab {

bool is_symmetric(const std::vector<double>& A, int n, double tol) {
  double scale = 0.0;
  for (double x : A) scale = std::max(scale, std::fabs(x));
  double abs_tol = tol * std::max(1.0, scale);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(A[i * n + j] - A[j * n + i]) > abs_tol) return false;
  return true;
}

namespace {
double offdiag_norm(const std::vector<double>& A, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) s += A[i * n + j] * A[i * n + j];
  return std::sqrt(s);
}
}  // namespace

EigenResult jacobi_eigen(const std::vector<double>& A_in, int n) {
  if (n <= 0 || static_cast<int>(A_in.size()) != n * n)
    throw std::invalid_argument("jacobi_eigen: bad matrix size");
  if (n > 256) throw std::invalid_argument("jacobi_eigen: n > 256 unsupported");
  if (!is_symmetric(A_in, n)) throw std::invalid_argument("jacobi_eigen: matrix not symmetric");

  std::vector<double> A = A_in;
  std::vector<double> V(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) V[i + static_cast<std::size_t>(n) * i] = 1.0;

  double fro = 0.0;
  for (double x : A) fro += x * x;
  double stop = 1e-13 * std::max(1.0, std::sqrt(fro));

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (offdiag_norm(A, n) <= stop) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = A[p * n + q];
        if (apq == 0.0) continue;
        double app = A[p * n + p], aqq = A[q * n + q];
        if (std::fabs(apq) <= 1e-300) { A[p * n + q] = A[q * n + p] = 0.0; continue; }
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = A[k * n + p], akq = A[k * n + q];
          A[k * n + p] = c * akp - s * akq;
          A[k * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = A[p * n + k], aqk = A[q * n + k];
          A[p * n + k] = c * apk - s * aqk;
          A[q * n + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = V[k + static_cast<std::size_t>(n) * p];
          double vkq = V[k + static_cast<std::size_t>(n) * q];
          V[k + static_cast<std::size_t>(n) * p] = c * vkp - s * vkq;
          V[k + static_cast<std::size_t>(n) * q] = s * vkp + c * vkq;
        }
      }
    }
  }

  EigenResult r;
  r.n = n;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = A[i * n + i];
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
  r.values.resize(n);
  r.vectors.resize(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    r.values[k] = d[idx[k]];
    for (int i = 0; i < n; ++i)
      r.vectors[i + static_cast<std::size_t>(n) * k] = V[i + static_cast<std::size_t>(n) * idx[k]];
  }
  return r;
}

SvdResult one_sided_jacobi_svd(const std::vector<double>& B, int rows, int cols) {
  if (rows <= 0 || cols <= 0 || static_cast<int>(B.size()) != rows * cols)
    throw std::invalid_argument("one_sided_jacobi_svd: bad matrix size");
  // column-major working copy
  std::vector<double> U(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) U[i + static_cast<std::size_t>(rows) * j] = B[i * cols + j];
  std::vector<double> V(static_cast<std::size_t>(cols) * cols, 0.0);
  for (int j = 0; j < cols; ++j) V[j + static_cast<std::size_t>(cols) * j] = 1.0;

  const double tol = 1e-15;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < cols - 1; ++p) {
      for (int q = p + 1; q < cols; ++q) {
        double* cp = &U[static_cast<std::size_t>(rows) * p];
        double* cq = &U[static_cast<std::size_t>(rows) * q];
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < rows; ++i) {
          app += cp[i] * cp[i];
          aqq += cq[i] * cq[i];
          apq += cp[i] * cq[i];
        }
        if (app == 0.0 || aqq == 0.0) continue;
        if (std::fabs(apq) <= tol * std::sqrt(app) * std::sqrt(aqq)) continue;
        rotated = true;
        double zeta = (aqq - app) / (2.0 * apq);
        double t = (zeta >= 0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(zeta * zeta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int i = 0; i < rows; ++i) {
          double xp = cp[i], xq = cq[i];
          cp[i] = c * xp - s * xq;
          cq[i] = s * xp + c * xq;
        }
        for (int i = 0; i < cols; ++i) {
          double vp = V[i + static_cast<std::size_t>(cols) * p];
          double vq = V[i + static_cast<std::size_t>(cols) * q];
          V[i + static_cast<std::size_t>(cols) * p] = c * vp - s * vq;
          V[i + static_cast<std::size_t>(cols) * q] = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  SvdResult r;
  r.rows = rows;
  r.cols = cols;
  r.singular.resize(cols);
  std::vector<int> idx(cols);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> nrm(cols);
  for (int j = 0; j < cols; ++j) {
    double s = 0.0;
    for (int i = 0; i < rows; ++i) {
      double x = U[i + static_cast<std::size_t>(rows) * j];
      s += x * x;
    }
    nrm[j] = std::sqrt(s);
  }
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return nrm[a] < nrm[b]; });
  r.v.resize(static_cast<std::size_t>(cols) * cols);
  for (int k = 0; k < cols; ++k) {
    r.singular[k] = nrm[idx[k]];
    for (int i = 0; i < cols; ++i)
      r.v[i + static_cast<std::size_t>(cols) * k] = V[i + static_cast<std::size_t>(cols) * idx[k]];
  }
  return r;
}

}  // namespace msplab
