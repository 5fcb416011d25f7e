#include "core/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "core/bits.hpp"
#include "core/jacobi.hpp"
#include "core/trace.hpp"

namespace msplab {

BoundReport dimension_lower_bound(const GramMatrix& G, double eps_or_slack, double kappa,
                                  BoundMode mode) {
  if (G.M < 1 || static_cast<std::size_t>(G.M) * G.M != G.G.size())
    throw std::invalid_argument("dimension_lower_bound: bad Gram matrix shape");
  BoundReport rep;
  rep.inputs.push_back({"M", std::to_string(G.M)});
  rep.inputs.push_back({"kappa", format_double(kappa)});
  if (mode == BoundMode::OpNorm) {
    const EigenResult eig = jacobi_eigen(G.G, G.M);
    const double opnorm =
        std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
    rep.inputs.push_back({"mode", "opnorm"});
    rep.inputs.push_back({"eps", format_double(eps_or_slack)});
    rep.inputs.push_back({"opnorm", format_double(opnorm)});
    rep.value = G.M * (1.0 - eps_or_slack) / opnorm;
    return rep;
  }
  rep.inputs.push_back({"mode", "rowsum"});
  rep.inputs.push_back({"slack", format_double(eps_or_slack)});
  if (!is_symmetric(G.G, G.M)) throw std::invalid_argument("dimension_lower_bound: not symmetric");
  if (eps_or_slack <= kappa) {
    rep.value = 0.0;
    rep.degenerate = true;
    return rep;
  }
  double worst = 0.0;
  for (int i = 0; i < G.M; ++i) {
    double row = 0.0;
    for (int j = 0; j < G.M; ++j) row += std::abs(G.G[static_cast<std::size_t>(i) * G.M + j]);
    worst = std::max(worst, row / G.M);
  }
  rep.inputs.push_back({"max_row_mean", format_double(worst)});
  rep.value = (eps_or_slack - kappa) / worst;
  return rep;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  __int128 c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;  // exact at every step
  return static_cast<double>(c);
}

BoundReport polyk_bound(int d, int k, int m, double slack) {
  if (k > d || k < 0 || d < 0) throw std::invalid_argument("polyk_bound: need 0 <= k <= d");
  if (m < 1) throw std::invalid_argument("polyk_bound: m must be >= 1");
  if (slack < 0.0 || slack > 1.0) throw std::invalid_argument("polyk_bound: slack in [0,1]");
  BoundReport rep;
  rep.value = slack / m * binom(d, k);
  rep.inputs = {{"d", std::to_string(d)},
                {"k", std::to_string(k)},
                {"m", std::to_string(m)},
                {"slack", format_double(slack)}};
  return rep;
}

BoundReport staircase_bound(int d, int P, double slack) {
  if (2 * P > d) throw std::invalid_argument("staircase_bound: requires P <= d/2");
  if (P < 1) throw std::invalid_argument("staircase_bound: P must be >= 1");
  if (slack < 0.0 || slack > 1.0) throw std::invalid_argument("staircase_bound: slack in [0,1]");
  const int j = static_cast<int>(std::floor(slack * P / 2.0));
  BoundReport rep;
  rep.value = slack / 2.0 * binom(d, j);
  rep.inputs = {{"d", std::to_string(d)},
                {"P", std::to_string(P)},
                {"slack", format_double(slack)},
                {"binom_index", std::to_string(j)}};
  return rep;
}

PermutedClassGram gram_permuted_class(const FourierFunction& h, int d, int degree,
                                      bool exact_degree) {
  if (d < 1 || d > 7) throw std::invalid_argument("gram_permuted_class: d must be in [1,7]");
  if (h.P > d) throw std::invalid_argument("gram_permuted_class: h needs more coordinates than d");

  using Image = std::vector<std::pair<std::uint32_t, double>>;
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::map<Image, int> seen;
  std::vector<Image> images;
  std::vector<long long> count;
  do {
    Image img;
    img.reserve(h.terms.size());
    for (const auto& [mask, a] : h.terms) {
      std::uint32_t out = 0;
      for (int i = 0; i < h.P; ++i)
        if ((mask >> i) & 1) out |= 1u << perm[i];
      img.push_back({out, a});
    }
    std::sort(img.begin(), img.end());
    auto [it, fresh] = seen.insert({img, static_cast<int>(images.size())});
    if (fresh) {
      images.push_back(std::move(img));
      count.push_back(1);
    } else {
      ++count[it->second];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  PermutedClassGram out;
  out.M = static_cast<int>(images.size());
  out.count = std::move(count);
  out.G.assign(static_cast<std::size_t>(out.M) * out.M, 0.0);
  auto in_window = [&](std::uint32_t mask) {
    const int deg = popcount(mask);
    return exact_degree ? deg == degree : deg >= degree;
  };
  for (int i = 0; i < out.M; ++i) {
    std::ostringstream lab;
    for (std::size_t t = 0; t < images[i].size(); ++t)
      lab << (t ? "|" : "") << set_to_string(images[i][t].first);
    out.labels.push_back(lab.str());
    for (int j = i; j < out.M; ++j) {
      double acc = 0.0;
      std::size_t a = 0, b = 0;
      while (a < images[i].size() && b < images[j].size()) {
        if (images[i][a].first == images[j][b].first) {
          if (in_window(images[i][a].first)) acc += images[i][a].second * images[j][b].second;
          ++a, ++b;
        } else if (images[i][a].first < images[j][b].first) {
          ++a;
        } else {
          ++b;
        }
      }
      out.G[static_cast<std::size_t>(i) * out.M + j] = acc;
      out.G[static_cast<std::size_t>(j) * out.M + i] = acc;
    }
  }
  return out;
}

double average_row_inner(const PermutedClassGram& g) {
  double total = 0.0, norm = 0.0;
  for (int j = 0; j < g.M; ++j) {
    total += static_cast<double>(g.count[j]) * g.G[j];
    norm += static_cast<double>(g.count[j]);
  }
  return total / norm;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  static const double A[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double B[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double C[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double D[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double pl = 0.02425;
  double x;
  if (p < pl) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
        ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
  } else if (p <= 1.0 - pl) {
    const double q = p - 0.5, r = q * q;
    x = (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q /
        (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
        ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
  }
  // one Halley step against the erfc-based CDF
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

BerryEsseenResult berry_esseen_w1(const std::vector<double>& v, int samples, Rng& rng) {
  if (v.empty()) throw std::invalid_argument("berry_esseen_w1: v must be nonzero");
  if (samples < 2) throw std::invalid_argument("berry_esseen_w1: need at least 2 samples");
  double n2 = 0.0, n3 = 0.0;
  for (double vi : v) {
    n2 += vi * vi;
    n3 += std::abs(vi) * vi * vi;
  }
  if (n2 == 0.0) throw std::invalid_argument("berry_esseen_w1: v must be nonzero");
  const double scale = 1.0 / std::sqrt(n2);

  std::vector<double> s(samples);
  std::vector<double> r;
  for (int t = 0; t < samples; ++t) {
    rng.rademacher_fill(r, v.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * r[i];
    s[t] = acc * scale;
  }
  std::sort(s.begin(), s.end());
  double w1 = 0.0;
  for (int i = 0; i < samples; ++i)
    w1 += std::abs(s[i] - normal_quantile((i + 0.5) / samples));
  BerryEsseenResult out;
  out.w1 = w1 / samples;
  out.bound = 3.0 * n3 / n2;
  return out;
}

int PolyGrid::span() const {
  int s = 1;
  for (int i = 0; i < vars; ++i) s *= D + 1;
  return s;
}

namespace {

double legendre_moment(int n) { return n % 2 == 0 ? 1.0 / (n + 1) : 0.0; }

// monomial coefficients of the orthonormal Legendre polynomials up to degree D
std::vector<std::vector<double>> legendre_coeffs(int D) {
  std::vector<std::vector<double>> P(D + 1);
  P[0] = {1.0};
  if (D >= 1) P[1] = {0.0, 1.0};
  for (int k = 1; k < D; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (int j = 0; j <= k; ++j) next[j + 1] += (2.0 * k + 1.0) / (k + 1.0) * P[k][j];
    for (int j = 0; j < k; ++j) next[j] -= static_cast<double>(k) / (k + 1.0) * P[k - 1][j];
    P[k + 1] = std::move(next);
  }
  for (int k = 0; k <= D; ++k)
    for (double& c : P[k]) c *= std::sqrt(2.0 * k + 1.0);
  return P;
}

void check_grid(const PolyGrid& h) {
  if (h.vars < 1 || h.vars > 4) throw std::invalid_argument("poly grid: vars must be in [1,4]");
  if (h.D < 0 || h.D > 8) throw std::invalid_argument("poly grid: D must be in [0,8]");
  if (static_cast<int>(h.c.size()) != h.span())
    throw std::invalid_argument("poly grid: coefficient array size");
}

}  // namespace

LegendreReport legendre_anticoncentration(const PolyGrid& h) {
  check_grid(h);
  const int n = h.D + 1;
  const int span = h.span();
  const auto L = legendre_coeffs(h.D);

  // W[e][k] = E[u^e * Ltilde_k(u)]
  std::vector<std::vector<double>> W(n, std::vector<double>(n, 0.0));
  for (int e = 0; e < n; ++e)
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int j = 0; j < static_cast<int>(L[k].size()); ++j)
        acc += L[k][j] * legendre_moment(e + j);
      W[e][k] = acc;
    }

  auto digits = [&](int flat, int* out) {
    for (int i = 0; i < h.vars; ++i) {
      out[i] = flat % n;
      flat /= n;
    }
  };

  LegendreReport rep;
  rep.g.assign(span, 0.0);
  int eb[4], bb[4];
  for (int b = 0; b < span; ++b) {
    digits(b, bb);
    double acc = 0.0;
    for (int e = 0; e < span; ++e) {
      if (h.c[e] == 0.0) continue;
      digits(e, eb);
      double prod = h.c[e];
      for (int i = 0; i < h.vars; ++i) prod *= W[eb[i]][bb[i]];
      acc += prod;
    }
    rep.g[b] = acc;
  }

  for (int e = 0; e < span; ++e) rep.l1_mass += std::abs(h.c[e]);
  int e2[4];
  for (int e = 0; e < span; ++e) {
    if (h.c[e] == 0.0) continue;
    digits(e, eb);
    for (int f = 0; f < span; ++f) {
      if (h.c[f] == 0.0) continue;
      digits(f, e2);
      double prod = h.c[e] * h.c[f];
      for (int i = 0; i < h.vars; ++i) prod *= legendre_moment(eb[i] + e2[i]);
      rep.second_moment += prod;
    }
  }

  double cmax = 0.0;
  for (const auto& row : L)
    for (double c : row) cmax = std::max(cmax, std::abs(c));
  const double cells = std::pow(static_cast<double>(n), h.vars);
  const double big = cells * std::pow(cmax, h.vars);
  rep.constant = 1.0 / (cells * big * big);
  return rep;
}

PolyGrid poly_shift_scale(const PolyGrid& h, const std::vector<double>& w,
                          const std::vector<double>& rho) {
  check_grid(h);
  if (static_cast<int>(w.size()) != h.vars || static_cast<int>(rho.size()) != h.vars)
    throw std::invalid_argument("poly_shift_scale: shift/scale arity");
  const int n = h.D + 1;
  PolyGrid out = h;
  // substitute one axis at a time: x_i = w_i + rho_i u_i
  for (int axis = 0; axis < h.vars; ++axis) {
    int stride = 1;
    for (int i = 0; i < axis; ++i) stride *= n;
    std::vector<double> next(out.c.size(), 0.0);
    std::vector<double> pw(n, 1.0), pr(n, 1.0);
    for (int e = 1; e < n; ++e) {
      pw[e] = pw[e - 1] * w[axis];
      pr[e] = pr[e - 1] * rho[axis];
    }
    for (int flat = 0; flat < static_cast<int>(out.c.size()); ++flat) {
      const double c = out.c[flat];
      if (c == 0.0) continue;
      const int e = (flat / stride) % n;
      const int base = flat - e * stride;
      for (int t = 0; t <= e; ++t)
        next[base + t * stride] += c * binom(e, t) * pw[e - t] * pr[t];
    }
    out.c = std::move(next);
  }
  return out;
}

std::string bound_report_line(const BoundReport& r) {
  std::ostringstream os;
  os << "bound=" << format_double(r.value);
  if (r.degenerate) os << " degenerate=1";
  for (const auto& [k, v] : r.inputs) os << " " << k << "=" << v;
  return os.str();
}

std::string bound_report_csv_row(const BoundReport& r) {
  std::ostringstream os;
  os << format_double(r.value) << "," << (r.degenerate ? 1 : 0);
  for (const auto& [k, v] : r.inputs) os << "," << v;
  return os.str();
}

}  // namespace msplab
