#pragma once
// Gauss quadrature against probability measures: nodes/weights normalized so
// weights sum to 1 (Hermite vs N(0,1), Legendre vs Unif[-1,1]).
#include <cstdint>
#include <functional>
#include <vector>

namespace msplab {

struct QuadratureRule {
  std::vector<double> x, w;
  int size() const { return static_cast<int>(x.size()); }
};

QuadratureRule hermite_rule(int n = 21);   // E[f(G)], G ~ N(0,1)
QuadratureRule legendre_rule(int n = 64);  // E[f(a)], a ~ Unif[-1,1]

inline double expect(const QuadratureRule& q, const std::function<double(double)>& f) {
  double s = 0.0;
  for (int i = 0; i < q.size(); ++i) s += q.w[i] * f(q.x[i]);
  return s;
}

// E_z[f(z)] over the uniform hypercube {-1,1}^P; f takes the +1-coordinate mask.
double expect_hypercube(int P, const std::function<double(std::uint32_t)>& f);

}  // namespace msplab
