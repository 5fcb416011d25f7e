#pragma once
// Dense symmetric eigensolver (cyclic Jacobi) and a one-sided Jacobi SVD.
// Intended for small matrices (kernel sizes up to 256x256).
#include <vector>

namespace msplab {

struct EigenResult {
  int n = 0;
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column-major: vectors[i + n*k] = v_k[i]
};

// A: row-major n*n, must be symmetric (checked to 1e-12 relative).
// Off-diagonal Frobenius norm is driven below 1e-12 * max(1, ||A||_F).
EigenResult jacobi_eigen(const std::vector<double>& A, int n);

bool is_symmetric(const std::vector<double>& A, int n, double tol = 1e-12);

struct SvdResult {
  int rows = 0, cols = 0;
  std::vector<double> singular;  // ascending
  std::vector<double> v;         // column-major cols*cols right singular vectors
};

// One-sided Jacobi on columns of B (row-major rows*cols, rows >= cols).
// Singular values of strongly graded matrices keep high relative accuracy.
SvdResult one_sided_jacobi_svd(const std::vector<double>& B, int rows, int cols);

}  // namespace msplab
