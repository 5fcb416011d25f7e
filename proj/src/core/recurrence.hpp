#pragma once
// Coefficient recurrences for the first-layer flow with the interaction term
// dropped: closed-form leading orders, the continuous and discrete polynomial
// tables, and the per-coordinate order exponents.
#include <cstdint>
#include <string>
#include <vector>

#include "core/activation.hpp"
#include "core/fourier.hpp"

namespace msplab {

struct CoeffTable {
  int P = 0;
  int L = 0;
  std::vector<double> p;  // p[(i-1)*L + (l-1)], coordinate i in [P], order l in [L]

  double at(int i, int l) const { return p[static_cast<std::size_t>(i - 1) * L + (l - 1)]; }
};

// u_k(a,t) to leading order: 2^{1-2^{k-1}} (at)^{2^{k-1}} prod (m_i alpha_i)^{2^max(k-1-i,0)}
// alpha[i-1] = coefficient of {1..i}; m[r] = sigma^{(r)}(0)
double vanilla_leading_order(const std::vector<double>& alpha, const std::vector<double>& m,
                             int k, double a, double t);

// Taylor table of the simplified flow: u_i(a,t) = sum_l (a t)^l p_il + O(t^{L+1})
CoeffTable continuous_coeff_table(const FourierFunction& h, const std::vector<double>& m,
                                  int L);

// Euler integration of du/dt = a E_z[h(z) sigma'(<u,z>) z] from u = 0
std::vector<double> simplified_integrate(const FourierFunction& h, const Activation& act,
                                         double a, double T1, double delta);

// discrete table p_{k,i}(zeta, xi, rho): xi[k][mask] are the step-k inputs,
// rho[r] = r-th Taylor coefficient of the activation; returns rows k = 0..k1
std::vector<std::vector<double>> discrete_coeff_eval(int P,
                                                     const std::vector<std::vector<double>>& xi,
                                                     const std::vector<double>& rho,
                                                     double zeta, int k1);

struct OrderExponents {
  std::vector<int> o;  // o[i-1] for coordinate i
};

// o_c = 1 + sum over the other coordinates of the set that introduces c;
// requires a minimal MSP structure (every set introduces exactly one fresh
// coordinate and the union covers [P])
OrderExponents order_exponents(const SetStructure& s);

std::string coeff_table_csv(const CoeffTable& t);

}  // namespace msplab
