#pragma once
// Reproducible RNG: a root seed plus a named stream id select an independent
// mt19937_64 sequence. All value mappings are explicit so results are
// bit-identical across platforms; platform distributions are never used.
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace msplab {

struct RngSpec {
  std::uint64_t seed = 0;
  std::string stream;  // e.g. "init", "data", "test-set"
};

std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
 public:
  explicit Rng(const RngSpec& spec);
  Rng(std::uint64_t seed, const std::string& stream);

  std::uint64_t next_u64();
  double uniform01();                       // [0,1)
  double uniform(double lo, double hi);     // [lo,hi)
  double normal();                          // N(0,1), Box-Muller
  int rademacher();                         // +-1
  void rademacher_fill(std::vector<double>& out, std::size_t n);

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace msplab
