#pragma once
// Fourier-Walsh representation of functions on {-1,1}^P and merged-staircase
// structure checks. Subsets are bitmasks (bit b <-> coordinate b+1).
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace msplab {

struct FourierFunction {
  int P = 0;
  // sorted by mask, only |alpha| > 1e-12 entries kept
  std::vector<std::pair<std::uint32_t, double>> terms;

  double alpha(std::uint32_t mask) const;
  double eval_mask(std::uint32_t z_plus_mask) const;
  double norm2() const;  // sum of alpha^2 = E[h^2]
  std::vector<std::uint32_t> support() const;
  std::vector<double> values_on_hypercube() const;  // indexed by z mask
};

FourierFunction make_fourier(int P, std::vector<std::pair<std::uint32_t, double>> terms);

// alpha_S = 2^-P sum_z h(z) chi_S(z); values indexed by z plus-mask.
FourierFunction walsh_transform(int P, const std::vector<double>& values);

std::string fourier_format(const FourierFunction& f);
FourierFunction fourier_parse(const std::string& text);

struct SetStructure {
  int P = 0;
  std::vector<std::uint32_t> sets;
};

struct MspResult {
  bool is_msp = false;
  int leap = 0;
  std::vector<std::uint32_t> ordering;   // greedy witness (one of possibly many)
  std::vector<std::uint32_t> reachable;  // maximal sub-collection orderable with leap <= 1
  std::uint32_t blocked_mask = 0;        // coordinates outside the reachable union
  double stuck_risk_lower_bound = 0.0;   // sum alpha_S^2 over unreachable sets (0 without coeffs)
};

MspResult msp_check(const SetStructure& s, const FourierFunction* coeffs = nullptr);
MspResult msp_check(const FourierFunction& f);
SetStructure structure_of(const FourierFunction& f);

// e.g. "MSP: yes, leap 1, ordering {1}<{1,2}<{1,2,3}"
std::string msp_report(const MspResult& m);

// oracle: min over all orderings of the max fresh-coordinate count (exhaustive)
int brute_force_leap(const SetStructure& s);

// all non-identity coordinate permutations tau with alpha_{tau(S)} = alpha_S; P <= 8
std::vector<std::vector<int>> detect_symmetries(const FourierFunction& f);

std::uint32_t permute_mask(std::uint32_t mask, const std::vector<int>& perm);

// coefficients +-Unif[lo,hi] on the given MSP structure, deterministic per rng
FourierFunction random_msp_function(const SetStructure& s, double lo, double hi, Rng& rng);

}  // namespace msplab
