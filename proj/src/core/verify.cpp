#include "core/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "core/bits.hpp"
#include "core/bounds.hpp"
#include "core/config.hpp"
#include "core/dynamics.hpp"
#include "core/experiments.hpp"
#include "core/fourier.hpp"
#include "core/jacobi.hpp"
#include "core/quadrature.hpp"
#include "core/recurrence.hpp"
#include "core/trace.hpp"
#include "core/twophase.hpp"

namespace msplab {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// tiny assertion helpers that accumulate into an Outcome
void require(Outcome& o, bool cond, const std::string& what) {
  if (!cond) {
    o.pass = false;
    o.detail += (o.detail.empty() ? "" : "; ") + what;
  }
}

void require_close(Outcome& o, double got, double want, double tol, const std::string& what) {
  if (!(std::fabs(got - want) <= tol))
    require(o, false,
            what + ": got " + format_double(got) + ", want " + format_double(want));
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1e-300));
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SetStructure random_structure(Rng& rng, int max_sets, int max_P) {
  SetStructure s;
  s.P = 2 + static_cast<int>(rng.next_u64() % (max_P - 1));
  const int m = 1 + static_cast<int>(rng.next_u64() % max_sets);
  for (int i = 0; i < m; ++i)
    s.sets.push_back(1u + static_cast<std::uint32_t>(rng.next_u64() % ((1u << s.P) - 1u)));
  return s;
}

// ------------------------------------------------------------------ checks

Outcome check_quadrature() {
  Outcome o;
  QuadratureRule gh = hermite_rule(21);
  auto mom = [&](int k) { return expect(gh, [k](double x) { return std::pow(x, k); }); };
  require_close(o, mom(0), 1.0, 1e-13, "E[1]");
  require_close(o, mom(2), 1.0, 1e-12, "E[G^2]");
  require_close(o, mom(4), 3.0, 1e-11, "E[G^4]");
  require_close(o, mom(6), 15.0, 1e-10, "E[G^6]");
  require_close(o, mom(8), 105.0, 1e-9, "E[G^8]");
  QuadratureRule gl = legendre_rule(64);
  auto lmom = [&](int k) { return expect(gl, [k](double x) { return std::pow(x, k); }); };
  require_close(o, lmom(2), 1.0 / 3.0, 1e-12, "E[a^2]");
  require_close(o, lmom(4), 1.0 / 5.0, 1e-12, "E[a^4]");
  require_close(o, lmom(20), 1.0 / 21.0, 1e-12, "E[a^20]");
  double wsum = 0.0;
  for (double w : gl.w) wsum += w;
  require_close(o, wsum, 1.0, 1e-13, "Legendre weight sum");
  if (o.pass) o.detail = "Gaussian and uniform moments exact";
  return o;
}

Outcome check_eigen() {
  Outcome o;
  EigenResult e = jacobi_eigen({2, 1, 1, 2}, 2);
  require_close(o, e.values[0], 1.0, 1e-12, "2x2 low");
  require_close(o, e.values[1], 3.0, 1e-12, "2x2 high");
  Rng rng(11, "verify-eigen");
  const int n = 12;
  std::vector<double> A(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) A[i * n + j] = A[j * n + i] = rng.uniform(-1.0, 1.0);
  EigenResult r = jacobi_eigen(A, n);
  double resid = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      double av = 0.0;
      for (int j = 0; j < n; ++j) av += A[i * n + j] * r.vectors[j + n * k];
      resid = std::max(resid, std::fabs(av - r.values[k] * r.vectors[i + n * k]));
    }
  require(o, resid <= 1e-9, "residual ||Av - lambda v|| = " + format_double(resid));
  double tr = 0.0, sum = 0.0;
  for (int i = 0; i < n; ++i) tr += A[i * n + i];
  for (double v : r.values) sum += v;
  require_close(o, sum, tr, 1e-10, "trace");
  if (o.pass) o.detail = "residual " + format_double(resid);
  return o;
}

Outcome check_svd() {
  Outcome o;
  // graded columns: tiny singular values must keep relative accuracy
  const double eps = 1e-9;
  SvdResult s = one_sided_jacobi_svd({1, eps, 1, -eps}, 2, 2);
  require_close(o, s.singular[1], std::sqrt(2.0), 1e-12, "large sv");
  require(o, std::fabs(s.singular[0] - std::sqrt(2.0) * eps) <= 1e-6 * std::sqrt(2.0) * eps,
          "tiny sv lost relative accuracy: " + format_double(s.singular[0]));
  Rng rng(7, "verify-svd");
  const int rows = 20, cols = 6;
  std::vector<double> B(rows * cols);
  for (double& v : B) v = rng.uniform(-1.0, 1.0);
  SvdResult r = one_sided_jacobi_svd(B, rows, cols);
  // compare against eigenvalues of B^T B
  std::vector<double> G(cols * cols, 0.0);
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int k = 0; k < rows; ++k) acc += B[k * cols + i] * B[k * cols + j];
      G[i * cols + j] = acc;
    }
  EigenResult e = jacobi_eigen(G, cols);
  for (int i = 0; i < cols; ++i)
    require_close(o, r.singular[i] * r.singular[i], e.values[i],
                  1e-9 * std::max(1.0, e.values[i]), "sv^2 vs eig " + std::to_string(i));
  if (o.pass) o.detail = "graded and random factors agree with eigensolver";
  return o;
}

Outcome check_fourier_roundtrip() {
  Outcome o;
  Rng rng(3, "verify-fourier");
  for (int trial = 0; trial < 20; ++trial) {
    const int P = 1 + static_cast<int>(rng.next_u64() % 5);
    std::vector<std::pair<std::uint32_t, double>> terms;
    for (std::uint32_t m = 0; m < (1u << P); ++m)
      if (rng.uniform01() < 0.4) terms.emplace_back(m, rng.uniform(-2.0, 2.0));
    FourierFunction f = make_fourier(P, terms);
    FourierFunction g = walsh_transform(P, f.values_on_hypercube());
    for (std::uint32_t m = 0; m < (1u << P); ++m)
      require(o, std::fabs(f.alpha(m) - g.alpha(m)) <= 1e-12, "walsh mismatch");
    FourierFunction h = fourier_parse(fourier_format(f));
    for (std::uint32_t m = 0; m < (1u << P); ++m)
      require(o, f.alpha(m) == h.alpha(m), "text round-trip not exact");
    double n2 = 0.0;
    for (auto& [m, a] : f.terms) n2 += a * a;
    require_close(o, f.norm2(), n2, 1e-14, "norm2");
  }
  if (o.pass) o.detail = "transform involutive, text format exact";
  return o;
}

Outcome check_msp_examples() {
  Outcome o;
  auto leap_of = [](std::initializer_list<std::uint32_t> sets, int P) {
    return msp_check(SetStructure{P, sets});
  };
  MspResult h2 = leap_of({0b001, 0b011, 0b111}, 3);
  require(o, h2.is_msp && h2.leap == 1, "depth-3 staircase");
  MspResult chain = leap_of({0b0001, 0b0011, 0b0110, 0b1100}, 4);
  require(o, chain.is_msp && chain.leap == 1, "overlapping chain");
  MspResult star = leap_of({0b0001, 0b0010, 0b0100, 0b1000, 0b1111}, 4);
  require(o, star.is_msp && star.leap == 1, "singletons plus full set");
  MspResult par = leap_of({0b111}, 3);
  require(o, !par.is_msp && par.leap == 3 && par.blocked_mask == 0b111, "bare 3-parity");
  MspResult l2 = leap_of({0b0001, 0b0111, 0b1111}, 4);
  require(o, !l2.is_msp && l2.leap == 2, "leap-2 ladder");
  MspResult split = leap_of({0b0001, 0b0011, 0b1100}, 4);
  require(o, !split.is_msp && split.leap == 2 && split.blocked_mask == 0b1100,
          "disconnected pair");
  MspResult empty = msp_check(SetStructure{3, {}});
  require(o, empty.is_msp && empty.leap == 0, "empty structure");
  if (o.pass) o.detail = "all textbook structures classify correctly";
  return o;
}

Outcome check_msp_greedy(int trials, int max_sets) {
  Outcome o;
  Rng rng(17, "verify-msp");
  for (int t = 0; t < trials; ++t) {
    SetStructure s = random_structure(rng, max_sets, 6);
    MspResult g = msp_check(s);
    const int ref = brute_force_leap(s);
    if (g.leap != ref) {
      require(o, false, "greedy leap " + std::to_string(g.leap) + " vs brute " +
                            std::to_string(ref));
      break;
    }
  }
  if (o.pass) o.detail = std::to_string(trials) + " random structures match the oracle";
  return o;
}

Outcome check_activation() {
  Outcome o;
  const std::vector<Activation> acts = {
      Activation::shifted_sigmoid(0.5), Activation::shifted_sigmoid(1.0),
      Activation::truncated_power(4), Activation::polynomial({0.1, 0.8, -0.3, 0.05}),
      Activation::tanh_act(), Activation::perturbed(Activation::tanh_act(), {0.0, 0.02})};
  Rng rng(5, "verify-act");
  for (const auto& a : acts) {
    for (int i = 0; i < 12; ++i) {
      const double x = rng.uniform(-0.8, 0.8);
      const double fd = (a.value(x + 5e-6) - a.value(x - 5e-6)) / 1e-5;
      require(o, std::fabs(fd - a.deriv(x)) <= 1e-6 * std::max(1.0, std::fabs(a.deriv(x))),
              a.describe() + ": derivative vs finite difference at x=" + format_double(x));
    }
    // Taylor partial sums approximate near zero
    const double x = 0.05;
    double sum = 0.0, fact = 1.0;
    for (int r = 0; r <= 9; ++r) {
      if (r > 0) fact *= r;
      sum += a.taylor(r) * std::pow(x, r) / fact;
    }
    require(o, std::fabs(sum - a.value(x)) <= 1e-8, a.describe() + ": Taylor sum at 0.05");
  }
  const Activation sig = Activation::shifted_sigmoid(0.5);
  const double s0 = 1.0 / (1.0 + std::exp(0.5));
  require_close(o, sig.value(0.0), s0, 1e-15, "sigmoid value at 0");
  require_close(o, sig.taylor(1), s0 * (1 - s0), 1e-14, "sigmoid slope at 0");
  if (o.pass) o.detail = "derivatives and Taylor data consistent for every kind";
  return o;
}

Outcome check_drift_potential(int states) {
  Outcome o;
  Rng rng(23, "verify-drift");
  FourierFunction h = make_fourier(3, {{0b001, 1.0}, {0b011, 0.8}, {0b111, 1.2}});
  Activation act = Activation::shifted_sigmoid(0.5);
  QuadratureRule herm = hermite_rule(21);
  const double xi_a = 0.7, xi_w = 1.3, la = 0.05, lw = 0.02;
  double worst = 0.0;
  for (int t = 0; t < states; ++t) {
    EffectiveEnsemble e = make_ensemble(3, legendre_rule(8), 0.4);
    for (auto& p : e.pts) {
      p.a += rng.uniform(-0.3, 0.3);
      for (double& ui : p.u) ui = rng.uniform(-0.7, 0.7);
      p.s = std::fabs(p.s + rng.uniform(-0.2, 0.2));
    }
    std::vector<double> drift;
    dfpde_drift(e, h, act, herm, xi_a, xi_w, la, lw, drift);
    const int j = static_cast<int>(rng.next_u64() % e.pts.size());
    const int stride = e.P + 2;
    std::vector<double> theta(stride);
    theta[0] = e.pts[j].a;
    for (int i = 0; i < e.P; ++i) theta[1 + i] = e.pts[j].u[i];
    theta[stride - 1] = e.pts[j].s;
    for (int comp = 0; comp < stride; ++comp) {
      const double eps = 1e-5;
      std::vector<double> tp = theta, tm = theta;
      tp[comp] += eps;
      tm[comp] -= eps;
      const double grad = (dfpde_potential(e, act, herm, h, j, tp, la, lw) -
                           dfpde_potential(e, act, herm, h, j, tm, la, lw)) /
                          (2 * eps);
      const double xi = comp == 0 ? xi_a : xi_w;
      const double want = -xi * grad;
      const double got = drift[j * stride + comp];
      const double rel = std::fabs(got - want) / std::max(1.0, std::fabs(want));
      worst = std::max(worst, rel);
    }
  }
  require(o, worst <= 1e-6, "drift vs -H grad potential rel err " + format_double(worst));
  if (o.pass) o.detail = "worst relative error " + format_double(worst);
  return o;
}

Outcome check_euler_order() {
  Outcome o;
  FourierFunction h = make_fourier(2, {{0b01, 1.0}, {0b11, 1.0}});
  Activation act = Activation::shifted_sigmoid(0.5);
  Schedules sch;
  auto risk_at = [&](double delta) {
    DfpdeOptions opt;
    opt.T = 1.0;
    opt.delta = delta;
    opt.record_dt = 1.0;
    DfpdeResult r = dfpde_integrate(h, make_ensemble(2, legendre_rule(32), 1.0), sch, act, opt);
    return r.trace.risk.back();
  };
  const double r1 = risk_at(0.02), r2 = risk_at(0.01), r3 = risk_at(0.005);
  const double ratio = std::fabs(r1 - r2) / std::fabs(r2 - r3);
  require(o, ratio >= 1.7 && ratio <= 2.3,
          "step-halving ratio " + format_double(ratio) + " outside [1.7, 2.3]");
  if (o.pass) o.detail = "halving ratio " + format_double(ratio);
  return o;
}

Outcome check_determinism() {
  Outcome o;
  FourierFunction h = make_fourier(3, {{0b001, 1.0}, {0b011, 1.0}, {0b111, 1.0}});
  Activation act = Activation::shifted_sigmoid(0.5);
  BsgdParams p;
  p.d = 24;
  p.N = 16;
  p.b = 12;
  p.eta = 0.25;
  p.steps = 30;
  p.test_m = 50;
  p.seed = RngSpec{42, "bsgd"};
  const std::string s1 = trace_csv(bsgd_train(h, act, p).trace);
  const std::string s2 = trace_csv(bsgd_train(h, act, p).trace);
  require(o, s1 == s2, "SGD reruns differ byte-wise");
  DfpdeOptions opt;
  opt.T = 0.5;
  opt.record_dt = 0.1;
  Schedules sch;
  const std::string d1 =
      trace_csv(dfpde_integrate(h, make_ensemble(3, legendre_rule(16), 1.0), sch, act, opt).trace);
  const std::string d2 =
      trace_csv(dfpde_integrate(h, make_ensemble(3, legendre_rule(16), 1.0), sch, act, opt).trace);
  require(o, d1 == d2, "effective-dynamics reruns differ byte-wise");
  if (o.pass) o.detail = "reruns byte-identical";
  return o;
}

Outcome check_stuck(const FourierFunction& h, double T, const char* label) {
  Outcome o;
  MspResult m = msp_check(h);
  require(o, !m.is_msp, std::string(label) + " unexpectedly MSP");
  Activation act = Activation::shifted_sigmoid(0.5);
  Schedules sch;
  EffectiveEnsemble e = make_ensemble(h.P, legendre_rule(48), 1.0);
  DfpdeOptions opt;
  opt.T = 0.25;
  opt.record_dt = 0.25;
  double max_blocked = 0.0, min_margin = 1e300;
  const int chunks = static_cast<int>(std::llround(T / 0.25));
  for (int c = 0; c < chunks; ++c) {
    DfpdeResult r = dfpde_integrate(h, std::move(e), sch, act, opt);
    e = std::move(r.final);
    max_blocked = std::max(max_blocked, max_abs_blocked(e, m.blocked_mask));
    for (double rk : r.trace.risk) min_margin = std::min(min_margin, rk - m.stuck_risk_lower_bound);
    require(o, !r.diverged, std::string(label) + " diverged");
  }
  require(o, max_blocked <= 1e-10,
          std::string(label) + ": blocked coordinate moved " + format_double(max_blocked));
  require(o, min_margin >= -1e-6,
          std::string(label) + ": risk undershot stuck bound by " + format_double(-min_margin));
  if (o.pass)
    o.detail = std::string(label) + ": blocked max " + format_double(max_blocked) +
               ", risk margin " + format_double(min_margin);
  return o;
}

Outcome check_kernel_basics() {
  Outcome o;
  // frozen map with U = 0: the kernel is the constant sigma(0)^2
  FirstLayerMap map;
  map.P = 2;
  map.T1 = 0.0;
  QuadratureRule gl = legendre_rule(16);
  map.a0 = gl.x;
  map.weight = gl.w;
  map.U.assign(map.nodes() * map.P, 0.0);
  map.activation = "test";
  map.source = "simplified";
  Activation act = Activation::shifted_sigmoid(0.5);
  KernelMatrix K = kernel_matrix(map, act);
  const double s0 = act.value(0.0);
  for (double v : K.K) require_close(o, v, s0 * s0, 1e-14, "flat kernel entry");
  require(o, lambda_min(K) >= -1e-12, "flat kernel not PSD");
  require_close(o, lambda_min_matrix({1, 0, 0, 0, 1, 0, 0, 0, 1}, 3), 1.0, 1e-12,
                "identity lambda_min");
  require_close(o, lambda_min_matrix({2, 1, 1, 2}, 2), 1.0, 1e-12, "2x2 lambda_min");
  // operator spectrum of the flat kernel: single nonzero mode sigma(0)^2
  KernelSpectrum ks = kernel_operator_spectrum(map, act);
  require_close(o, ks.eigenvalues.back(), s0 * s0, 1e-12, "flat operator top eigenvalue");
  for (std::size_t i = 0; i + 1 < ks.eigenvalues.size(); ++i)
    require(o, std::fabs(ks.eigenvalues[i]) <= 1e-14, "flat operator null modes");
  if (o.pass) o.detail = "flat map, identity and 2x2 cases all exact";
  return o;
}

Outcome check_phase2_modes() {
  Outcome o;
  FourierFunction h = make_fourier(2, {{0b01, 1.0}, {0b11, 1.0}});
  Activation act = Activation::shifted_sigmoid(0.5);
  FirstLayerMap map = phase1(h, act, 0.3, legendre_rule(48), 1e-4, Phase1Variant::Full);
  KernelMatrix K = kernel_matrix(map, act);
  const double T2 = map.T1 + 5.0;
  Phase2Result ex = phase2(K, h, map, act, T2, 1.0, Phase2Mode::Exact);
  Phase2Result eu = phase2(K, h, map, act, T2, 1.0, Phase2Mode::Euler, 1e-3);
  require_close(o, ex.trace.risk.front(), eu.trace.risk.front(), 1e-12, "risk at T1");
  require(o, std::fabs(ex.trace.risk.back() - eu.trace.risk.back()) <=
                  1e-3 * std::max(1e-9, ex.trace.risk.back()) + 1e-9,
          "exact vs Euler final risk: " + format_double(ex.trace.risk.back()) + " vs " +
              format_double(eu.trace.risk.back()));
  require(o, ex.trace.risk.back() <= ex.trace.risk.front() + 1e-15, "risk must not increase");
  if (o.pass)
    o.detail = "exact and Euler agree, risk monotone (final " +
               format_double(ex.trace.risk.back()) + ")";
  return o;
}

Outcome check_recurrence_basics() {
  Outcome o;
  Rng rng(31, "verify-rec");
  // first order: p_i1 = m1 alpha_{i}
  FourierFunction h =
      make_fourier(3, {{0b001, 0.7}, {0b010, -0.4}, {0b011, 1.1}, {0b111, 0.9}});
  std::vector<double> m = {0.3, 0.8, -0.2, 0.5, 0.1};
  CoeffTable tab = continuous_coeff_table(h, m, 4);
  require_close(o, tab.at(1, 1), 0.8 * 0.7, 1e-14, "p_{1,1}");
  require_close(o, tab.at(2, 1), 0.8 * -0.4, 1e-14, "p_{2,1}");
  require_close(o, tab.at(3, 1), 0.0, 1e-14, "p_{3,1}");
  // second order on the depth-2 staircase: p_{2,2} = m1 m2 alpha_1 alpha_12 / 2
  FourierFunction v2 = make_fourier(2, {{0b01, 0.9}, {0b11, 1.3}});
  CoeffTable t2 = continuous_coeff_table(v2, m, 3);
  require_close(o, t2.at(2, 2), 0.5 * 0.8 * -0.2 * 0.9 * 1.3, 1e-14, "p_{2,2}");
  // pure parity: the whole table vanishes
  CoeffTable t3 = continuous_coeff_table(make_fourier(3, {{0b111, 1.0}}), m, 4);
  for (int i = 1; i <= 3; ++i)
    for (int l = 1; l <= 4; ++l)
      require(o, std::fabs(t3.at(i, l)) <= 1e-14, "parity table nonzero");
  // linear activation: no higher orders on a single singleton
  CoeffTable lin = continuous_coeff_table(make_fourier(1, {{0b1, 1.0}}),
                                          {0.0, 1.0, 0.0, 0.0, 0.0}, 4);
  require_close(o, lin.at(1, 1), 1.0, 1e-14, "linear p_{1,1}");
  for (int l = 2; l <= 4; ++l)
    require(o, std::fabs(lin.at(1, l)) <= 1e-14, "linear activation higher order");
  // cubic route: h = z1, p_{1,3} = alpha^3 m3 m1^2 / 6
  const double al = 1.4;
  CoeffTable cub = continuous_coeff_table(make_fourier(1, {{0b1, al}}), m, 4);
  require_close(o, cub.at(1, 3), al * al * al * m[3] * m[1] * m[1] / 6.0, 1e-13, "p_{1,3}");
  OrderExponents v = order_exponents({3, {0b001, 0b011, 0b111}});
  require(o, v.o == std::vector<int>({1, 2, 4}), "vanilla order exponents");
  OrderExponents w = order_exponents({3, {0b001, 0b010, 0b111}});
  require(o, w.o == std::vector<int>({1, 1, 3}), "mixed order exponents");
  if (o.pass) o.detail = "first orders, closed forms and order exponents all match";
  return o;
}

Outcome check_discrete_recurrence(int trials) {
  Outcome o;
  Rng rng(37, "verify-disc");
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int P = 2 + static_cast<int>(rng.next_u64() % 2);
    std::vector<std::pair<std::uint32_t, double>> terms;
    for (std::uint32_t mask = 1; mask < (1u << P); ++mask)
      if (rng.uniform01() < 0.5) terms.emplace_back(mask, rng.uniform(-1.0, 1.0));
    if (terms.empty()) terms.emplace_back(1, 1.0);
    FourierFunction h = make_fourier(P, terms);
    std::vector<double> mc(5);
    for (double& v : mc) v = rng.uniform(-1.0, 1.0);
    mc[1] = rng.uniform(0.5, 1.5);
    Activation act = Activation::polynomial(mc);
    const double eta = 0.05;
    const int k1 = 4;
    EffectiveEnsemble e = make_ensemble(P, legendre_rule(16), 0.0);
    QuadratureRule herm = hermite_rule(21);
    std::vector<std::vector<double>> xi;
    for (int k = 0; k < k1; ++k) {
      std::vector<double> fv = effective_predict_all(e, act, herm);
      std::vector<double> res(1 << P);
      for (int z = 0; z < (1 << P); ++z) res[z] = h.eval_mask(z) - fv[z];
      FourierFunction rf = walsh_transform(P, res);
      std::vector<double> row(1 << P, 0.0);
      for (int s = 0; s < (1 << P); ++s) row[s] = rf.alpha(s);
      xi.push_back(std::move(row));
      dfpde_step_discrete(e, h, act, herm, 0.0, eta, 0.0, 0.0);
    }
    const std::vector<double> rho = act.taylor_upto(6);
    for (int j : {0, 8, 15}) {
      auto table = discrete_coeff_eval(P, xi, rho, eta * e.pts[j].a, k1);
      for (int i = 1; i <= P; ++i)
        worst = std::max(worst, std::fabs(table[k1][i - 1] - e.pts[j].u[i - 1]));
    }
  }
  require(o, worst <= 1e-9, "discrete table vs integrator: " + format_double(worst));
  if (o.pass) o.detail = "max deviation " + format_double(worst);
  return o;
}

Outcome check_bounds_spot() {
  Outcome o;
  require_close(o, binom(10, 3), 120.0, 0.0, "C(10,3)");
  require_close(o, binom(7, 0), 1.0, 0.0, "C(7,0)");
  require_close(o, polyk_bound(4, 2, 1, 1.0).value, 6.0, 0.0, "poly-k spot");
  require_close(o, staircase_bound(10, 4, 1.0).value, 22.5, 0.0, "staircase spot");
  GramMatrix id;
  id.M = 5;
  id.G.assign(25, 0.0);
  for (int i = 0; i < 5; ++i) id.G[i * 5 + i] = 1.0;
  require_close(o, dimension_lower_bound(id, 0.2, 0.0, BoundMode::OpNorm).value, 4.0, 1e-12,
                "identity opnorm bound");
  BoundReport deg = dimension_lower_bound(id, 0.1, 0.2, BoundMode::RowSum);
  require(o, deg.degenerate && deg.value == 0.0, "rowsum slack <= kappa must degenerate");
  BoundReport rs = dimension_lower_bound(id, 0.5, 0.1, BoundMode::RowSum);
  require_close(o, rs.value, (0.5 - 0.1) / (1.0 / 5.0), 1e-12, "rowsum identity");
  if (o.pass) o.detail = "binomials, spot bounds and both modes agree";
  return o;
}

Outcome check_gram_average(int dmax) {
  Outcome o;
  for (int d = 4; d <= dmax; ++d) {
    // depth-3 staircase with alpha = 1/sqrt(3), window: degree >= 1
    const double a = 1.0 / std::sqrt(3.0);
    FourierFunction st = make_fourier(3, {{0b001, a}, {0b011, a}, {0b111, a}});
    double closed = 0.0;
    for (int i = 1; i <= 3; ++i) closed += 1.0 / binom(d, i);
    closed /= 3.0;
    const double avg = average_row_inner(gram_permuted_class(st, d, 1, false));
    require_close(o, avg, closed, 1e-12, "staircase row average d=" + std::to_string(d));
    // two degree-2 monomials with alpha = 1/sqrt(4): poly-k closed form (m/2)/C(d,k)
    if (d >= 4) {
      const double b = 0.5;
      FourierFunction pk = make_fourier(4, {{0b0011, b}, {0b1100, b}});
      const double got = average_row_inner(gram_permuted_class(pk, d, 2, true));
      require_close(o, got, (2.0 / 2.0) / binom(d, 2), 1e-12,
                    "poly-k row average d=" + std::to_string(d));
    }
  }
  if (o.pass) o.detail = "row averages match the closed forms to 1e-12";
  return o;
}

Outcome check_quantile() {
  Outcome o;
  require_close(o, normal_quantile(0.5), 0.0, 1e-14, "median");
  double worst = 0.0;
  for (double x = -5.0; x <= 5.0; x += 0.25) {
    const double p = 0.5 * std::erfc(-x / std::sqrt(2.0));
    worst = std::max(worst, std::fabs(normal_quantile(p) - x));
  }
  require(o, worst <= 1e-9, "quantile inversion err " + format_double(worst));
  if (o.pass) o.detail = "max inversion error " + format_double(worst);
  return o;
}

Outcome check_berry_esseen(int vectors, int samples) {
  Outcome o;
  Rng rng(47, "verify-be");
  // a single spike: the empirical W1 approaches the exact two-point value
  Rng r2(48, "verify-be-spike");
  BerryEsseenResult spike = berry_esseen_w1({1.0}, 200000, r2);
  require_close(o, spike.w1, 0.5353772, 0.02, "two-point W1");
  require(o, spike.w1 <= spike.bound, "bound violated on the spike");
  int violations = 0;
  for (int t = 0; t < vectors; ++t) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 40);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    BerryEsseenResult r = berry_esseen_w1(v, samples, rng);
    if (r.w1 > r.bound) ++violations;
  }
  require(o, violations == 0, std::to_string(violations) + " bound violations");
  if (o.pass) o.detail = "0 violations on " + std::to_string(vectors) + " vectors";
  return o;
}

Outcome check_legendre(int polys) {
  Outcome o;
  Rng rng(53, "verify-leg");
  double worst = 0.0;
  for (int t = 0; t < polys; ++t) {
    PolyGrid h;
    h.vars = 1 + static_cast<int>(rng.next_u64() % 3);
    h.D = 1 + static_cast<int>(rng.next_u64() % 4);
    h.c.resize(h.span());
    for (double& v : h.c) v = rng.uniform(-1.0, 1.0);
    LegendreReport rep = legendre_anticoncentration(h);
    double parseval = 0.0;
    for (double g : rep.g) parseval += g * g;
    worst = std::max(worst, std::fabs(parseval - rep.second_moment) /
                                std::max(1.0, rep.second_moment));
    require(o, rep.constant > 0.0, "anticoncentration constant not positive");
    require(o, rep.second_moment + 1e-12 >= rep.constant * rep.l1_mass * rep.l1_mass,
            "second moment below the certified floor");
    // shifting and rescaling keeps the grid consistent
    std::vector<double> w(h.vars), rho(h.vars);
    for (int i = 0; i < h.vars; ++i) {
      w[i] = rng.uniform(-0.3, 0.3);
      rho[i] = rng.uniform(0.2, 0.7);
    }
    PolyGrid sh = poly_shift_scale(h, w, rho);
    LegendreReport rep2 = legendre_anticoncentration(sh);
    double p2 = 0.0;
    for (double g : rep2.g) p2 += g * g;
    worst = std::max(worst,
                     std::fabs(p2 - rep2.second_moment) / std::max(1.0, rep2.second_moment));
  }
  require(o, worst <= 1e-9, "Parseval mismatch " + format_double(worst));
  if (o.pass) o.detail = "Parseval holds to " + format_double(worst);
  return o;
}

Outcome check_config() {
  Outcome o;
  const std::string text =
      "kind = demo\n# a comment\n\n[target]\nP = 3\nS = 1 alpha=1\nS = 1,2 alpha=0.5\n\n"
      "[dynamics]\nT = 2.5\nnodes = 32\n";
  Config c = config_parse(text);
  require(o, c.get("", "kind") == "demo", "preamble key");
  require(o, c.find_all("target", "S").size() == 2, "repeated keys");
  require_close(o, c.get_double("dynamics", "T"), 2.5, 0.0, "double getter");
  require(o, c.get_int_or("dynamics", "nodes", 0) == 32, "int getter");
  Config c2 = config_parse(config_format(c));
  require(o, c2.entries.size() == c.entries.size(), "format round-trip size");
  for (std::size_t i = 0; i < c.entries.size(); ++i)
    require(o, c.entries[i].section == c2.entries[i].section &&
                   c.entries[i].key == c2.entries[i].key &&
                   c.entries[i].value == c2.entries[i].value,
            "format round-trip entry");
  bool threw = false;
  try {
    config_parse("just a line without equals\n");
  } catch (const ConfigError&) {
    threw = true;
  }
  require(o, threw, "malformed line must throw");
  threw = false;
  try {
    c.get_double("dynamics", "missing");
  } catch (const ConfigError&) {
    threw = true;
  }
  require(o, threw, "missing key must throw");
  if (o.pass) o.detail = "parse, typed getters and round-trip all behave";
  return o;
}

Outcome check_presets() {
  Outcome o;
  for (const std::string& name : preset_names()) {
    Config c = preset_config(name);
    require(o, c.has("", "kind"), name + " missing kind");
    if (c.has("target", "P")) {
      FourierFunction h = target_from_config(c);
      require(o, h.P >= 1, name + " target empty");
    }
    Activation a = activation_from_config(c);
    require(o, !a.describe().empty(), name + " activation");
  }
  MspResult h2 = msp_check(make_fourier(3, {{0b001, 1.0}, {0b011, 1.0}, {0b111, 1.0}}));
  require(o, h2.is_msp && h2.leap == 1 && h2.ordering.size() == 3, "depth-3 report data");
  if (o.pass) o.detail = std::to_string(preset_names().size()) + " presets load";
  return o;
}

Outcome check_subspace_rank(int trials) {
  Outcome o;
  Rng rng(61, "verify-rank");
  int violations = 0;
  for (int t = 0; t < trials; ++t) {
    const int M = 4 + static_cast<int>(rng.next_u64() % 20);
    const int dim = rng.uniform01() < 0.5 ? M + 10 : 2 + static_cast<int>(rng.next_u64() % M);
    std::vector<std::vector<double>> v(M, std::vector<double>(dim));
    for (auto& row : v) {
      double n2 = 0.0;
      for (double& x : row) {
        x = rng.normal();
        n2 += x * x;
      }
      for (double& x : row) x /= std::sqrt(n2);
    }
    GramMatrix g;
    g.M = M;
    g.G.assign(static_cast<std::size_t>(M) * M, 0.0);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) {
        double acc = 0.0;
        for (int k = 0; k < dim; ++k) acc += v[i][k] * v[j][k];
        g.G[static_cast<std::size_t>(i) * M + j] = acc;
      }
    EigenResult e = jacobi_eigen(g.G, M);
    int rank = 0;
    for (double lam : e.values)
      if (lam > 1e-8 * std::max(1.0, e.values.back())) ++rank;
    const double bound = dimension_lower_bound(g, 0.0, 0.0, BoundMode::OpNorm).value;
    if (static_cast<double>(rank) + 1e-9 < bound) ++violations;
  }
  require(o, violations == 0, std::to_string(violations) + " rank bound violations");
  if (o.pass) o.detail = "0 violations on " + std::to_string(trials) + " trials";
  return o;
}

Outcome check_fig1() {
  Outcome o;
  Config c = preset_config("fig1");
  FourierFunction h = target_from_config(c);
  Activation act = activation_from_config(c);
  DfpdeOptions opt = dfpde_options_from_config(c);
  ChunkedRun pde = dfpde_chunked(h, ensemble_from_config(c, h), schedules_from_config(c), act,
                                 opt, 0, {}, 0.0, /*keep_snapshots=*/true);
  require(o, !pde.diverged, "effective dynamics diverged");
  require(o, pde.trace.risk.back() < 0.1,
          "final effective risk " + format_double(pde.trace.risk.back()));
  double prev = -1.0;
  for (std::size_t j = 0; j < pde.trace.tracked.size(); ++j) {
    const double tc = pde.trace.first_crossing(j, 0.5);
    require(o, tc >= 0.0, "coefficient " + std::to_string(j) + " never crossed 0.5");
    require(o, tc > prev, "crossings out of order");
    prev = tc;
  }
  // both dynamics scored under each SGD run's own finite test measure
  QuadratureRule hermite = hermite_rule(opt.hermite_nodes);
  std::vector<std::vector<double>> pred(pde.snapshots.size());
  for (std::size_t i = 0; i < pde.snapshots.size(); ++i)
    pred[i] = effective_predict_all(pde.snapshots[i], act, hermite);
  double gaps = 0.0;
  const int seeds = 5;
  for (int k = 0; k < seeds; ++k) {
    BsgdResult sgd = bsgd_train(h, act, bsgd_params_from_config(c, 1 + k));
    require(o, !sgd.diverged, "SGD diverged");
    gaps += shared_measure_gap(pred, sgd);
  }
  const double mean_gap = gaps / seeds;
  require(o, mean_gap <= 0.15, "mean sup gap " + format_double(mean_gap));
  if (o.pass)
    o.detail = "risk " + format_double(pde.trace.risk.back()) + ", mean gap " +
               format_double(mean_gap);
  return o;
}

Outcome check_two_phase_full() {
  Outcome o;
  Activation act = Activation::shifted_sigmoid(0.5);
  QuadratureRule gl = legendre_rule(64);
  for (int P : {2, 3}) {
    std::vector<std::pair<std::uint32_t, double>> terms;
    for (int i = 1; i <= P; ++i) terms.emplace_back((1u << i) - 1u, 1.0);
    FourierFunction h = make_fourier(P, terms);
    CertifyReport rep = two_phase_certify(h, act, 0.1, gl, 5e-4, 1e-3);
    require(o, rep.risk_t2 <= 1e-3 + 1e-12,
            "P=" + std::to_string(P) + " final risk " + format_double(rep.risk_t2));
    require(o, rep.risk_t2 <= 2.0 * rep.predicted_risk + 1e-300 &&
                   rep.predicted_risk <= 2.0 * rep.risk_t2 + 1e-300,
            "P=" + std::to_string(P) + " realized vs predicted");
  }
  // lambda_min(T1) scales like T1^(2 beta({1,2})) = T1^6 for P = 2
  std::vector<double> ladder = {0.02, 0.05, 0.1};
  std::vector<double> lam;
  FourierFunction h2 = make_fourier(2, {{0b01, 1.0}, {0b11, 1.0}});
  for (double T1 : ladder) {
    CertifyReport rep = two_phase_certify(h2, act, T1, gl, T1 / 200.0, 1e-3);
    require(o, rep.lambda_min > 0.0, "operator eigenvalue underflowed at T1=" +
                                         format_double(T1));
    lam.push_back(rep.lambda_min);
  }
  const double slope = fit_loglog_slope(ladder, lam);
  require(o, slope >= 5.0 && slope <= 7.0,
          "lambda_min ladder slope " + format_double(slope) + " not near 6");
  if (o.pass) o.detail = "risk certified, ladder slope " + format_double(slope);
  return o;
}

Outcome check_appA() {
  Outcome o;
  Activation act = Activation::shifted_sigmoid(1.0);
  Schedules sch;
  struct Case {
    const char* name;
    FourierFunction h;
    bool stuck;
  };
  std::vector<Case> cases;
  cases.push_back({"h3",
                   make_fourier(4, {{0b0001, 1.0}, {0b0011, 1.0}, {0b0100, 1.0}, {0b1100, 1.0}}),
                   true});
  cases.push_back(
      {"h4", make_fourier(3, {{0b001, 1.0}, {0b010, 1.0}, {0b100, 1.0}, {0b111, 1.0}}), true});
  cases.push_back({"h4tilde",
                   make_fourier(3, {{0b001, 1.0}, {0b010, 0.99}, {0b100, 1.01}, {0b111, 1.0}}),
                   false});
  for (auto& cs : cases) {
    auto syms = detect_symmetries(cs.h);
    DfpdeOptions opt;
    opt.T = cs.stuck ? 60.0 : 200.0;
    opt.record_dt = 1.0;
    ChunkedRun run = dfpde_chunked(cs.h, make_ensemble(cs.h.P, legendre_rule(64), 1.0), sch,
                                   act, opt, 0, syms, 0.0);
    require(o, !run.diverged, std::string(cs.name) + " diverged");
    double max_gap = 0.0;
    for (double g : run.max_sym_gap) max_gap = std::max(max_gap, g);
    const double final_risk = run.trace.risk.back();
    if (cs.stuck) {
      require(o, !syms.empty(), std::string(cs.name) + " has no detected symmetry");
      require(o, max_gap <= 1e-9,
              std::string(cs.name) + " symmetry gap " + format_double(max_gap));
      require(o, final_risk > 0.2,
              std::string(cs.name) + " plateau risk " + format_double(final_risk));
    } else {
      require(o, final_risk < 0.05,
              std::string(cs.name) + " final risk " + format_double(final_risk));
    }
  }
  if (o.pass) o.detail = "plateaus preserved, perturbed variant learns";
  return o;
}

}  // namespace

bool VerifyResult::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

VerifyResult run_verify(VerifyLevel level) {
  struct Row {
    const char* name;
    bool quick;
    std::function<Outcome()> fn;
  };
  const std::vector<Row> rows = {
      {"numerics.quadrature", true, check_quadrature},
      {"numerics.eigen", true, check_eigen},
      {"numerics.svd", true, check_svd},
      {"fourier.roundtrip", true, check_fourier_roundtrip},
      {"fourier.msp-examples", true, check_msp_examples},
      {"fourier.msp-greedy", true, [] { return check_msp_greedy(2000, 6); }},
      {"fourier.msp-greedy-deep", false, [] { return check_msp_greedy(10000, 7); }},
      {"activation.derivatives", true, check_activation},
      {"dynamics.drift-potential", true, [] { return check_drift_potential(10); }},
      {"dynamics.euler-order", true, check_euler_order},
      {"dynamics.determinism", true, check_determinism},
      {"dynamics.stuck-parity", true,
       [] { return check_stuck(make_fourier(3, {{0b111, 1.0}}), 1.0, "bare parity"); }},
      {"dynamics.stuck-presets", false,
       [] {
         Outcome a = check_stuck(target_from_config(preset_config("fig4-leap2")), 5.0, "leap2");
         Outcome b = check_stuck(target_from_config(preset_config("fig4-leap3")), 5.0, "leap3");
         Outcome o;
         o.pass = a.pass && b.pass;
         o.detail = a.detail + "; " + b.detail;
         return o;
       }},
      {"twophase.kernel", true, check_kernel_basics},
      {"twophase.modes", true, check_phase2_modes},
      {"twophase.certify", false, check_two_phase_full},
      {"recurrence.tables", true, check_recurrence_basics},
      {"recurrence.discrete", true, [] { return check_discrete_recurrence(5); }},
      {"recurrence.discrete-deep", false, [] { return check_discrete_recurrence(20); }},
      {"bounds.spot", true, check_bounds_spot},
      {"bounds.gram-average", true, [] { return check_gram_average(5); }},
      {"bounds.gram-average-deep", false, [] { return check_gram_average(6); }},
      {"bounds.quantile", true, check_quantile},
      {"bounds.berry-esseen", true, [] { return check_berry_esseen(10, 20000); }},
      {"bounds.berry-esseen-deep", false, [] { return check_berry_esseen(50, 100000); }},
      {"bounds.legendre", true, [] { return check_legendre(20); }},
      {"bounds.legendre-deep", false, [] { return check_legendre(100); }},
      {"bounds.subspace-rank", false, [] { return check_subspace_rank(100); }},
      {"config.roundtrip", true, check_config},
      {"experiments.presets", true, check_presets},
      {"experiments.fig1", false, check_fig1},
      {"experiments.appA", false, check_appA},
  };

  VerifyResult res;
  for (const auto& row : rows) {
    if (level == VerifyLevel::Quick && !row.quick) continue;
    VerifyCheck c;
    c.name = row.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      Outcome out = row.fn();
      c.pass = out.pass;
      c.detail = out.detail;
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.checks.push_back(std::move(c));
  }
  return res;
}

std::string verify_report(const VerifyResult& r) {
  std::ostringstream out;
  int failed = 0;
  for (const auto& c : r.checks) {
    out << (c.pass ? "pass" : "FAIL") << "  " << c.name;
    std::ostringstream secs;
    secs.setf(std::ios::fixed);
    secs.precision(2);
    secs << c.seconds;
    out << " (" << secs.str() << "s)";
    if (!c.detail.empty()) out << ": " << c.detail;
    out << "\n";
    if (!c.pass) ++failed;
  }
  out << (failed == 0 ? "all checks passed"
                      : std::to_string(failed) + " check(s) FAILED")
      << " (" << r.checks.size() << " run)\n";
  return out.str();
}

}  // namespace msplab
