#pragma once
// Sample-complexity lower bounds for linear methods and the two probabilistic
// verifiers backing them: a Wasserstein Berry-Esseen check and Legendre-basis
// polynomial anticoncentration.
#include <cstdint>
#include <string>
#include <vector>

#include "core/fourier.hpp"
#include "core/rng.hpp"

namespace msplab {

struct GramMatrix {
  int M = 0;
  std::vector<double> G;  // row-major M x M, symmetric
  std::vector<std::string> labels;
};

struct BoundReport {
  double value = 0.0;
  bool degenerate = false;  // rowsum mode with slack <= kappa
  std::vector<std::pair<std::string, std::string>> inputs;
};

enum class BoundMode { OpNorm, RowSum };

// opnorm: M (1 - eps) / ||G||_op.  rowsum: (slack - kappa) / max_i mean_j |G_ij|.
// `slack` is the risk-slack parameter (the paper reuses the learning-rate letter
// for it); eps plays its role in opnorm mode.
BoundReport dimension_lower_bound(const GramMatrix& G, double eps_or_slack, double kappa,
                                  BoundMode mode);

// exact binomial coefficient as a double (128-bit exact intermediate)
double binom(int n, int k);

BoundReport polyk_bound(int d, int k, int m, double slack);   // (slack/m) C(d,k)
BoundReport staircase_bound(int d, int P, double slack);      // (slack/2) C(d, floor(slack P/2))

struct PermutedClassGram {
  int M = 0;                     // number of distinct images h o tau
  std::vector<double> G;         // Gram of the projected images, row-major
  std::vector<long long> count;  // orbit multiplicity per image; sums to d!
  std::vector<std::string> labels;
};

// Gram matrix of {h o tau : tau permutes [d]} projected onto monomials of degree
// exactly `degree` (exact_degree) or >= `degree`; identity image is row 0
PermutedClassGram gram_permuted_class(const FourierFunction& h, int d, int degree,
                                      bool exact_degree);

// multiplicity-weighted average of <f_id, P f_tau> over all d! permutations
double average_row_inner(const PermutedClassGram& g);

double normal_quantile(double p);  // inverse standard normal CDF

struct BerryEsseenResult {
  double w1 = 0.0;     // empirical quantile-matched Wasserstein-1 distance
  double bound = 0.0;  // 3 ||v||_3^3 / ||v||_2^2
};

// W1 between <v,r>/||v||_2 (r Rademacher) and N(0,1)
BerryEsseenResult berry_esseen_w1(const std::vector<double>& v, int samples, Rng& rng);

// dense multivariate polynomial on [-1,1]^vars: c[e_1 + e_2 (D+1) + ...]
struct PolyGrid {
  int vars = 0;
  int D = 0;
  std::vector<double> c;

  int span() const;  // (D+1)^vars
};

struct LegendreReport {
  double second_moment = 0.0;  // E[h^2], exact via moments
  double l1_mass = 0.0;        // sum |c_e|
  std::vector<double> g;       // orthonormal-Legendre coefficients, Parseval partner
  double constant = 0.0;       // c with E[h^2] >= c (sum |c_e|)^2
};

LegendreReport legendre_anticoncentration(const PolyGrid& h);

// coefficients of u -> h(w + rho o u), same grid shape
PolyGrid poly_shift_scale(const PolyGrid& h, const std::vector<double>& w,
                          const std::vector<double>& rho);

std::string bound_report_line(const BoundReport& r);
std::string bound_report_csv_row(const BoundReport& r);

}  // namespace msplab
