#include "core/rng.hpp"

#include <cmath>

namespace msplab {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {
std::uint64_t derive_stream_seed(std::uint64_t seed, const std::string& stream) {
  // fold the stream name into the seed via splitmix steps, FNV-style start
  std::uint64_t s = seed ^ 0xcbf29ce484222325ULL;
  for (unsigned char c : stream) {
    s ^= c;
    (void)splitmix64(s);
  }
  return splitmix64(s);
}
}  // namespace

Rng::Rng(const RngSpec& spec) : eng_(derive_stream_seed(spec.seed, spec.stream)) {}
Rng::Rng(std::uint64_t seed, const std::string& stream)
    : eng_(derive_stream_seed(seed, stream)) {}

std::uint64_t Rng::next_u64() { return eng_(); }

double Rng::uniform01() {
  // 53 random bits -> [0,1)
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01(), u2 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

int Rng::rademacher() { return (eng_() >> 63) ? 1 : -1; }

void Rng::rademacher_fill(std::vector<double>& out, std::size_t n) {
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rademacher();
}

}  // namespace msplab
