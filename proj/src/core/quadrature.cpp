#include "core/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "core/jacobi.hpp"

namespace msplab {

namespace {
// Golub-Welsch from the symmetric tridiagonal recurrence matrix.
QuadratureRule from_tridiagonal(const std::vector<double>& offdiag, int n) {
  std::vector<double> J(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k + 1 < n; ++k) {
    J[k * n + k + 1] = offdiag[k];
    J[(k + 1) * n + k] = offdiag[k];
  }
  EigenResult e = jacobi_eigen(J, n);
  QuadratureRule q;
  q.x.resize(n);
  q.w.resize(n);
  for (int k = 0; k < n; ++k) {
    q.x[k] = e.values[k];
    double v0 = e.vectors[0 + static_cast<std::size_t>(n) * k];
    q.w[k] = v0 * v0;  // measure already normalized to mass 1
  }
  return q;
}
}  // namespace

QuadratureRule hermite_rule(int n) {
  if (n < 1 || n > 128) throw std::invalid_argument("hermite_rule: n out of range");
  std::vector<double> b(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) b[k - 1] = std::sqrt(static_cast<double>(k));
  return from_tridiagonal(b, n);
}

QuadratureRule legendre_rule(int n) {
  if (n < 1 || n > 128) throw std::invalid_argument("legendre_rule: n out of range");
  std::vector<double> b(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) b[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return from_tridiagonal(b, n);
}

double expect_hypercube(int P, const std::function<double(std::uint32_t)>& f) {
  if (P < 0 || P > 16) throw std::invalid_argument("expect_hypercube: P out of range");
  const std::uint32_t n = 1u << P;
  double s = 0.0;
  for (std::uint32_t zm = 0; zm < n; ++zm) s += f(zm);
  return s / static_cast<double>(n);
}

}  // namespace msplab
