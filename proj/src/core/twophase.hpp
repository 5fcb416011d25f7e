#pragma once
// Layer-wise training certification: phase-1 first-layer flow, the kernel of the
// linear second phase, its minimum eigenvalue, and the monomial Gram matrix.
#include <cstdint>
#include <string>
#include <vector>

#include "core/activation.hpp"
#include "core/dynamics.hpp"
#include "core/fourier.hpp"
#include "core/jacobi.hpp"
#include "core/quadrature.hpp"
#include "core/trace.hpp"

namespace msplab {

enum class Phase1Variant { Full, Simplified };

struct FirstLayerMap {
  int P = 0;
  double T1 = 0.0;
  std::vector<double> a0;      // node values of the frozen second layer
  std::vector<double> weight;  // node weights, sum 1
  std::vector<double> U;       // row-major nodes x P, U[j*P + i] = u_i(a0_j)
  std::string activation;
  std::string source;  // "continuous" | "discrete" | "simplified"

  int nodes() const { return static_cast<int>(a0.size()); }
};

// first-layer flow from u = 0 with a frozen (xi_a = 0, xi_w = 1, lambda = 0, s = 0)
FirstLayerMap phase1(const FourierFunction& h, const Activation& act, double T1,
                     const QuadratureRule& a_rule, double delta, Phase1Variant variant);

struct KernelMatrix {
  int P = 0;
  std::vector<double> K;  // row-major 2^P x 2^P, indexed by z mask
};

// K(z,z') = E_a[sigma(<u(a),z>) sigma(<u(a),z'>)]
KernelMatrix kernel_matrix(const FirstLayerMap& map, const Activation& act);

// smallest eigenvalue of an explicit symmetric matrix (cyclic Jacobi)
double lambda_min(const KernelMatrix& K);
double lambda_min_matrix(const std::vector<double>& A, int n);

// spectrum of the kernel as an operator on L2({-1,1}^P): entries E_a[phi_S phi_S'],
// phi_S(a) = E_z[chi_S(z) sigma(<u(a),z>)].  Factor form sqrt(w_j) phi_S(a_j) feeds a
// one-sided Jacobi SVD, so tiny eigenvalues come out with high relative accuracy.
struct KernelSpectrum {
  std::vector<double> eigenvalues;  // ascending, size 2^P
  std::vector<double> phi;          // row-major nodes x 2^P, phi[j*M + S]
};
KernelSpectrum kernel_operator_spectrum(const FirstLayerMap& map, const Activation& act);

enum class Phase2Mode { Exact, Euler, Discrete };

struct Phase2Result {
  TrainingTrace trace;          // risk = E_z[g_t(z)^2]
  double lambda_min = 0.0;      // operator eigenvalue floor used for the rate
  double plateau = 0.0;         // kernel-mass floor when lambda_min <= threshold
  bool degenerate = false;      // residual mass sits in the kernel of K
  std::vector<double> g_final;  // residual on the hypercube at the end
};

// second phase: residual g_t(z) = fhat_t(z) - h(z) follows dg/dt = -E_z'[K(z,z')g(z')]
Phase2Result phase2(const KernelMatrix& K, const FourierFunction& h,
                    const FirstLayerMap& map, const Activation& act, double T2,
                    double record_dt, Phase2Mode mode, double euler_delta = 0.01);

// Gram matrix of the monomials a^{beta(S)} under Unif[-1,1], beta(S) = sum 2^{k-1}
std::uint64_t beta_signature(std::uint32_t set_mask);
std::vector<double> gram_monomial_matrix(int P);  // row-major 2^P x 2^P

struct CertifyReport {
  double T1 = 0.0;
  double T2 = 0.0;
  double lambda_min = 0.0;   // operator spectrum floor
  double risk_t1 = 0.0;
  double risk_t2 = 0.0;
  double predicted_risk = 0.0;  // sum_i exp(-2 lambda_i (T2-T1)) gamma_i^2
  bool certified = false;       // lambda_min > 1e-10
  std::string activation;
};

// end-to-end: phase1 at T1, exact-mode phase2 run to the T2 implied by target_risk
CertifyReport two_phase_certify(const FourierFunction& h, const Activation& act, double T1,
                                const QuadratureRule& a_rule, double delta,
                                double target_risk);

std::string kernel_csv(const KernelMatrix& K);
std::string gram_csv(int P, const std::vector<double>& M);
std::string certify_report_text(const CertifyReport& r);

}  // namespace msplab
