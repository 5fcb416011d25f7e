#pragma once
// Subsets of [P] are stored as bitmasks: bit b (0-based) <-> coordinate b+1.
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace msplab {

inline int popcount(std::uint32_t m) { return std::popcount(m); }

// chi_S(z) for z given as a bitmask of coordinates set to +1 (clear bit = -1).
// chi_S(z) = prod_{i in S} z_i = (-1)^{|S \ zmask|}
inline int chi_sign(std::uint32_t set_mask, std::uint32_t z_plus_mask) {
  return (std::popcount(set_mask & ~z_plus_mask) & 1) ? -1 : 1;
}

// z as a vector of +-1 from a plus-mask
inline void z_from_mask(std::uint32_t z_plus_mask, int P, std::vector<int>& z) {
  z.resize(P);
  for (int b = 0; b < P; ++b) z[b] = (z_plus_mask >> b) & 1 ? 1 : -1;
}

// "1,3,4" (1-based, ascending); empty set -> ""
inline std::string set_to_string(std::uint32_t mask) {
  std::string s;
  for (int b = 0; b < 32; ++b) {
    if (!((mask >> b) & 1)) continue;
    if (!s.empty()) s += ',';
    s += std::to_string(b + 1);
  }
  return s;
}

// column label for traces: c_1_3; empty set -> c_0
inline std::string set_column_label(std::uint32_t mask) {
  if (mask == 0) return "c_0";
  std::string s = "c";
  for (int b = 0; b < 32; ++b)
    if ((mask >> b) & 1) s += "_" + std::to_string(b + 1);
  return s;
}

}  // namespace msplab
