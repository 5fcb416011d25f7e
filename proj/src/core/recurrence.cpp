#include "core/recurrence.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "core/bits.hpp"
#include "core/trace.hpp"

namespace msplab {

double vanilla_leading_order(const std::vector<double>& alpha, const std::vector<double>& m,
                             int k, double a, double t) {
  if (k < 1) throw std::invalid_argument("vanilla_leading_order: k must be >= 1");
  if (static_cast<int>(alpha.size()) < k || static_cast<int>(m.size()) < k + 1)
    throw std::invalid_argument("vanilla_leading_order: need alpha_1..k and m_1..k");
  const double deg = std::pow(2.0, k - 1);
  double out = std::pow(2.0, 1.0 - deg) * std::pow(a * t, deg);
  for (int i = 1; i <= k; ++i) {
    const double e = std::pow(2.0, std::max(k - 1 - i, 0));
    out *= std::pow(m[i] * alpha[i - 1], e);
  }
  return out;
}

CoeffTable continuous_coeff_table(const FourierFunction& h, const std::vector<double>& m,
                                  int L) {
  if (L < 1 || L > 24) throw std::invalid_argument("continuous_coeff_table: L out of range");
  const int P = h.P;
  const int M = 1 << P;
  auto mr = [&](int r) { return r < static_cast<int>(m.size()) ? m[r] : 0.0; };

  CoeffTable tab;
  tab.P = P;
  tab.L = L;
  tab.p.assign(static_cast<std::size_t>(P) * L, 0.0);
  auto pref = [&](int i, int l) -> double& {
    return tab.p[static_cast<std::size_t>(i - 1) * L + (l - 1)];
  };

  for (int l = 1; l <= L; ++l) {
    // F[r][xi*l + d] = sum over r-tuples (i_1,l_1)..(i_r,l_r) with parity xi and
    // total order d of prod p_{i_q, l_q}
    const int D = l;  // degrees 0..l-1
    std::vector<std::vector<double>> F;
    F.emplace_back(static_cast<std::size_t>(M) * D, 0.0);
    F[0][0] = 1.0;  // xi = empty, degree 0
    for (int r = 1; r <= l - 1; ++r) {
      std::vector<double> next(static_cast<std::size_t>(M) * D, 0.0);
      const std::vector<double>& prev = F[r - 1];
      for (int xi = 0; xi < M; ++xi)
        for (int d = r; d <= l - 1; ++d) {
          double acc = 0.0;
          for (int ip = 1; ip <= P; ++ip) {
            const int xprev = xi ^ (1 << (ip - 1));
            for (int lp = 1; lp <= d - (r - 1); ++lp)
              acc += prev[static_cast<std::size_t>(xprev) * D + (d - lp)] * pref(ip, lp);
          }
          next[static_cast<std::size_t>(xi) * D + d] = acc;
        }
      F.push_back(std::move(next));
    }
    double rfact = 1.0;
    for (int i = 1; i <= P; ++i) {
      double acc = 0.0;
      rfact = 1.0;
      for (int r = 0; r <= l - 1; ++r) {
        if (r > 0) rfact *= r;
        const double mc = mr(r + 1);
        if (mc == 0.0) continue;
        double inner = 0.0;
        for (int xi = 0; xi < M; ++xi) {
          const double f = F[r][static_cast<std::size_t>(xi) * D + (l - 1)];
          if (f == 0.0) continue;
          inner += f * h.alpha(static_cast<std::uint32_t>(xi ^ (1 << (i - 1))));
        }
        acc += mc / rfact * inner;
      }
      pref(i, l) = acc / l;
    }
  }
  return tab;
}

std::vector<double> simplified_integrate(const FourierFunction& h, const Activation& act,
                                         double a, double T1, double delta) {
  if (T1 < 0.0 || delta <= 0.0) throw std::invalid_argument("simplified_integrate: times");
  const int P = h.P;
  const int M = 1 << P;
  const std::vector<double> hv = h.values_on_hypercube();
  std::vector<double> u(P, 0.0), du(P);
  const long long nsteps = std::llround(T1 / delta);
  for (long long k = 0; k < nsteps; ++k) {
    std::fill(du.begin(), du.end(), 0.0);
    for (int mpt = 0; mpt < M; ++mpt) {
      double inner = 0.0;
      for (int i = 0; i < P; ++i) inner += ((mpt >> i) & 1) ? u[i] : -u[i];
      const double hd = hv[mpt] * act.deriv(inner);
      for (int i = 0; i < P; ++i) du[i] += ((mpt >> i) & 1) ? hd : -hd;
    }
    for (int i = 0; i < P; ++i) u[i] += delta * a * du[i] / M;
  }
  return u;
}

std::vector<std::vector<double>> discrete_coeff_eval(int P,
                                                     const std::vector<std::vector<double>>& xi,
                                                     const std::vector<double>& rho,
                                                     double zeta, int k1) {
  if (P < 1 || P > 16) throw std::invalid_argument("discrete_coeff_eval: P out of range");
  if (k1 < 0 || k1 > 8) throw std::invalid_argument("discrete_coeff_eval: k1 out of range");
  if (rho.size() > 17) throw std::invalid_argument("discrete_coeff_eval: rho too long");
  if (static_cast<int>(xi.size()) < k1)
    throw std::invalid_argument("discrete_coeff_eval: need xi for every step");
  const int M = 1 << P;
  for (int k = 0; k < k1; ++k)
    if (static_cast<int>(xi[k].size()) != M)
      throw std::invalid_argument("discrete_coeff_eval: xi row size");
  auto rr = [&](int r) { return r < static_cast<int>(rho.size()) ? rho[r] : 0.0; };

  std::vector<std::vector<double>> p(k1 + 1, std::vector<double>(P, 0.0));
  const int rmax = static_cast<int>(rho.size()) - 2;  // need rho[r+1]
  std::vector<double> Fprev(M), Fcur(M);
  for (int k = 0; k < k1; ++k) {
    for (int i = 1; i <= P; ++i) p[k + 1][i - 1] = p[k][i - 1] + zeta * rr(1) * xi[k][1u << (i - 1)];
    std::fill(Fprev.begin(), Fprev.end(), 0.0);
    Fprev[0] = 1.0;
    double rfact = 1.0;
    for (int r = 1; r <= rmax; ++r) {
      rfact *= r;
      std::fill(Fcur.begin(), Fcur.end(), 0.0);
      for (int s = 0; s < M; ++s) {
        if (Fprev[s] == 0.0) continue;
        for (int ip = 1; ip <= P; ++ip)
          Fcur[s ^ (1 << (ip - 1))] += Fprev[s] * p[k][ip - 1];
      }
      const double rc = rr(r + 1);
      if (rc != 0.0) {
        for (int i = 1; i <= P; ++i) {
          double acc = 0.0;
          for (int s = 0; s < M; ++s) {
            if (Fcur[s] == 0.0) continue;
            acc += Fcur[s] * xi[k][static_cast<std::uint32_t>(s) ^ (1u << (i - 1))];
          }
          p[k + 1][i - 1] += zeta * rc / rfact * acc;
        }
      }
      std::swap(Fprev, Fcur);
    }
  }
  return p;
}

OrderExponents order_exponents(const SetStructure& s) {
  const MspResult chk = msp_check(s);
  const std::uint32_t full = s.P >= 32 ? ~0u : ((1u << s.P) - 1);
  if (!chk.is_msp || static_cast<int>(s.sets.size()) != s.P)
    throw std::invalid_argument("order_exponents: structure is not a minimal MSP");
  OrderExponents out;
  out.o.assign(s.P, 0);
  std::uint32_t seen = 0;
  for (std::uint32_t set : chk.ordering) {
    const std::uint32_t fresh = set & ~seen;
    if (popcount(fresh) != 1)
      throw std::invalid_argument(
          "order_exponents: every set must introduce exactly one fresh coordinate");
    int c = 0;
    while (!((fresh >> c) & 1)) ++c;
    int acc = 1;
    for (int i = 0; i < s.P; ++i)
      if (i != c && ((set >> i) & 1)) acc += out.o[i];
    out.o[c] = acc;
    seen |= set;
  }
  if (seen != full) throw std::invalid_argument("order_exponents: sets do not cover [P]");
  return out;
}

std::string coeff_table_csv(const CoeffTable& t) {
  std::ostringstream os;
  os << "i,l,value\n";
  for (int i = 1; i <= t.P; ++i)
    for (int l = 1; l <= t.L; ++l)
      os << i << "," << l << "," << format_double(t.at(i, l)) << "\n";
  return os.str();
}

}  // namespace msplab
