#include "core/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "core/bits.hpp"

namespace msplab {

namespace {
constexpr double kDropThreshold = 1e-12;

void check_P(int P) {
  if (P < 0 || P > 16) throw std::invalid_argument("fourier: P out of range [0,16]");
}
}  // namespace

double FourierFunction::alpha(std::uint32_t mask) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), mask,
                             [](const auto& t, std::uint32_t m) { return t.first < m; });
  if (it != terms.end() && it->first == mask) return it->second;
  return 0.0;
}

double FourierFunction::eval_mask(std::uint32_t z_plus_mask) const {
  double s = 0.0;
  for (const auto& [m, a] : terms) s += a * chi_sign(m, z_plus_mask);
  return s;
}

double FourierFunction::norm2() const {
  double s = 0.0;
  for (const auto& [m, a] : terms) s += a * a;
  return s;
}

std::vector<std::uint32_t> FourierFunction::support() const {
  std::vector<std::uint32_t> out;
  out.reserve(terms.size());
  for (const auto& [m, a] : terms) out.push_back(m);
  return out;
}

std::vector<double> FourierFunction::values_on_hypercube() const {
  std::vector<double> v(1u << P, 0.0);
  for (std::uint32_t zm = 0; zm < v.size(); ++zm) v[zm] = eval_mask(zm);
  return v;
}

FourierFunction make_fourier(int P, std::vector<std::pair<std::uint32_t, double>> terms) {
  check_P(P);
  FourierFunction f;
  f.P = P;
  std::sort(terms.begin(), terms.end());
  for (const auto& [m, a] : terms) {
    if (m >= (1u << P)) throw std::invalid_argument("fourier: set outside [P]");
    if (!f.terms.empty() && f.terms.back().first == m)
      throw std::invalid_argument("fourier: duplicate set");
    if (std::fabs(a) > kDropThreshold) f.terms.emplace_back(m, a);
  }
  return f;
}

FourierFunction walsh_transform(int P, const std::vector<double>& values) {
  check_P(P);
  const std::uint32_t n = 1u << P;
  if (values.size() != n) throw std::invalid_argument("walsh_transform: need 2^P values");
  std::vector<std::pair<std::uint32_t, double>> terms;
  for (std::uint32_t m = 0; m < n; ++m) {
    double s = 0.0;
    for (std::uint32_t zm = 0; zm < n; ++zm) s += values[zm] * chi_sign(m, zm);
    s /= static_cast<double>(n);
    if (std::fabs(s) > kDropThreshold) terms.emplace_back(m, s);
  }
  return make_fourier(P, std::move(terms));
}

std::string fourier_format(const FourierFunction& f) {
  std::ostringstream out;
  out << "P=" << f.P << "\n";
  for (const auto& [m, a] : f.terms) {
    char buf[40];
    int len = std::snprintf(buf, sizeof buf, "%.17g", a);
    out << "S=" << set_to_string(m) << " alpha=" << std::string(buf, len) << "\n";
  }
  return out.str();
}

FourierFunction fourier_parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int P = -1;
  std::vector<std::pair<std::uint32_t, double>> terms;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string t = line.substr(first, last - first + 1);
    if (t.empty() || t[0] == '#') continue;
    if (P < 0) {
      if (t.rfind("P=", 0) != 0)
        throw std::invalid_argument("fourier_parse: expected P=<int> header");
      P = std::stoi(t.substr(2));
      check_P(P);
      continue;
    }
    if (t.rfind("S=", 0) != 0)
      throw std::invalid_argument("fourier_parse: line " + std::to_string(lineno) +
                                  ": expected S=<indices> alpha=<decimal>");
    auto ap = t.find(" alpha=");
    if (ap == std::string::npos)
      throw std::invalid_argument("fourier_parse: line " + std::to_string(lineno) +
                                  ": missing alpha=");
    std::string idx = t.substr(2, ap - 2);
    double a = std::stod(t.substr(ap + 7));
    std::uint32_t mask = 0;
    std::stringstream ss(idx);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      int i = std::stoi(tok);
      if (i < 1 || i > P)
        throw std::invalid_argument("fourier_parse: line " + std::to_string(lineno) +
                                    ": index out of [1,P]");
      mask |= 1u << (i - 1);
    }
    terms.emplace_back(mask, a);
  }
  if (P < 0) throw std::invalid_argument("fourier_parse: empty input");
  return make_fourier(P, std::move(terms));
}

namespace {
int fresh_count(std::uint32_t set, std::uint32_t covered) { return popcount(set & ~covered); }

// greedy closure at level l; returns emitted order (input order scan each round)
std::vector<std::uint32_t> greedy_order(const std::vector<std::uint32_t>& sets, int l,
                                        std::vector<char>* emitted_out) {
  std::vector<char> emitted(sets.size(), 0);
  std::vector<std::uint32_t> order;
  std::uint32_t covered = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (emitted[i]) continue;
      if (fresh_count(sets[i], covered) <= l) {
        emitted[i] = 1;
        covered |= sets[i];
        order.push_back(sets[i]);
        progress = true;
      }
    }
  }
  if (emitted_out) *emitted_out = emitted;
  return order;
}
}  // namespace

MspResult msp_check(const SetStructure& s, const FourierFunction* coeffs) {
  if (s.P < 0 || s.P > 16) throw std::invalid_argument("msp_check: P out of range");
  for (auto m : s.sets)
    if (m >= (1u << s.P)) throw std::invalid_argument("msp_check: set outside [P]");

  MspResult r;
  // leap: smallest l whose greedy closure emits everything
  for (int l = 0; l <= s.P; ++l) {
    std::vector<char> emitted;
    auto order = greedy_order(s.sets, l, &emitted);
    if (order.size() == s.sets.size()) {
      r.leap = l;
      r.ordering = order;
      break;
    }
  }
  r.is_msp = r.leap <= 1;

  std::vector<char> emitted1;
  auto reach_order = greedy_order(s.sets, 1, &emitted1);
  r.reachable = reach_order;
  std::uint32_t covered = 0;
  for (auto m : reach_order) covered |= m;
  r.blocked_mask = ((s.P ? ((1u << s.P) - 1) : 0u)) & ~covered;
  if (coeffs) {
    double b = 0.0;
    for (std::size_t i = 0; i < s.sets.size(); ++i)
      if (!emitted1[i]) {
        double a = coeffs->alpha(s.sets[i]);
        b += a * a;
      }
    r.stuck_risk_lower_bound = b;
  }
  return r;
}

std::string msp_report(const MspResult& m) {
  auto fmt = [](std::uint32_t mask) { return "{" + set_to_string(mask) + "}"; };
  std::ostringstream out;
  out << "MSP: " << (m.is_msp ? "yes" : "no") << ", leap " << m.leap;
  if (m.is_msp) {
    out << ", ordering ";
    for (std::size_t i = 0; i < m.ordering.size(); ++i) out << (i ? "<" : "") << fmt(m.ordering[i]);
  } else {
    out << "\nreachable:";
    if (m.reachable.empty()) out << " (none)";
    for (std::size_t i = 0; i < m.reachable.size(); ++i)
      out << (i ? ", " : " ") << fmt(m.reachable[i]);
    out << "\nblocked coordinates: " << (m.blocked_mask ? fmt(m.blocked_mask) : "(none)");
    std::ostringstream b;
    b << m.stuck_risk_lower_bound;
    out << "\nstuck risk lower bound: " << b.str();
  }
  return out.str();
}

SetStructure structure_of(const FourierFunction& f) {
  SetStructure s;
  s.P = f.P;
  s.sets = f.support();
  return s;
}

MspResult msp_check(const FourierFunction& f) { return msp_check(structure_of(f), &f); }

namespace {
void leap_recurse(const std::vector<std::uint32_t>& sets, std::vector<char>& used,
                  std::uint32_t covered, int depth, int worst, int& best) {
  if (depth == static_cast<int>(sets.size())) {
    best = std::min(best, worst);
    return;
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    int w = std::max(worst, fresh_count(sets[i], covered));
    leap_recurse(sets, used, covered | sets[i], depth + 1, w, best);
    used[i] = 0;
  }
}
}  // namespace

int brute_force_leap(const SetStructure& s) {
  if (s.sets.empty()) return 0;
  std::vector<char> used(s.sets.size(), 0);
  int best = 32;
  leap_recurse(s.sets, used, 0, 0, 0, best);
  return best;
}

std::uint32_t permute_mask(std::uint32_t mask, const std::vector<int>& perm) {
  std::uint32_t out = 0;
  for (std::size_t b = 0; b < perm.size(); ++b)
    if ((mask >> b) & 1) out |= 1u << perm[b];
  return out;
}

std::vector<std::vector<int>> detect_symmetries(const FourierFunction& f) {
  if (f.P > 8) throw std::invalid_argument("detect_symmetries: P > 8 unsupported");
  std::vector<int> perm(f.P);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> found;
  const double tol = 1e-12;
  do {
    bool identity = true;
    for (int i = 0; i < f.P; ++i)
      if (perm[i] != i) { identity = false; break; }
    if (identity) continue;
    bool ok = true;
    for (const auto& [m, a] : f.terms) {
      if (std::fabs(f.alpha(permute_mask(m, perm)) - a) > tol) { ok = false; break; }
    }
    if (ok) found.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return found;
}

FourierFunction random_msp_function(const SetStructure& s, double lo, double hi, Rng& rng) {
  if (!(lo > 0.0) || !(hi >= lo))
    throw std::invalid_argument("random_msp_function: need 0 < lo <= hi");
  if (!msp_check(s).is_msp)
    throw std::invalid_argument("random_msp_function: structure is not an MSP");
  std::vector<std::pair<std::uint32_t, double>> terms;
  for (auto m : s.sets) terms.emplace_back(m, rng.rademacher() * rng.uniform(lo, hi));
  return make_fourier(s.P, std::move(terms));
}

}  // namespace msplab
