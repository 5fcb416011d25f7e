#include "core/dynamics.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "core/bits.hpp"

namespace msplab {

namespace {

constexpr double kDivergenceRisk = 1e10;

// Gaussian averages per particle and hypercube point, layout [j * M + m].
struct GaussCache {
  std::vector<double> sig, sigp, sigpg;
};

void fill_cache(const EffectiveEnsemble& e, const Activation& act, const QuadratureRule& herm,
                GaussCache& c) {
  const int M = 1 << e.P;
  const std::size_t total = static_cast<std::size_t>(e.size()) * M;
  c.sig.assign(total, 0.0);
  c.sigp.assign(total, 0.0);
  c.sigpg.assign(total, 0.0);
  for (int j = 0; j < e.size(); ++j) {
    const Particle& p = e.pts[j];
    for (int m = 0; m < M; ++m) {
      double inner = 0.0;
      for (int i = 0; i < e.P; ++i) inner += ((m >> i) & 1) ? p.u[i] : -p.u[i];
      double sv = 0.0, dv = 0.0, dg = 0.0;
      if (p.s == 0.0) {
        sv = act.value(inner);
        dv = act.deriv(inner);
      } else {
        for (std::size_t k = 0; k < herm.x.size(); ++k) {
          const double x = inner + p.s * herm.x[k];
          const double d = act.deriv(x);
          sv += herm.w[k] * act.value(x);
          dv += herm.w[k] * d;
          dg += herm.w[k] * d * herm.x[k];
        }
      }
      const std::size_t at = static_cast<std::size_t>(j) * M + m;
      c.sig[at] = sv;
      c.sigp[at] = dv;
      c.sigpg[at] = dg;
    }
  }
}

std::vector<double> predict_from_cache(const EffectiveEnsemble& e, const GaussCache& c) {
  const int M = 1 << e.P;
  std::vector<double> fh(M, 0.0);
  for (int j = 0; j < e.size(); ++j) {
    const double wa = e.w[j] * e.pts[j].a;
    for (int m = 0; m < M; ++m) fh[m] += wa * c.sig[static_cast<std::size_t>(j) * M + m];
  }
  return fh;
}

std::vector<double> tracked_coeffs(int P, const std::vector<double>& fh,
                                   const std::vector<std::uint32_t>& tracked) {
  const int M = 1 << P;
  std::vector<double> out(tracked.size(), 0.0);
  for (std::size_t c = 0; c < tracked.size(); ++c) {
    double acc = 0.0;
    for (int m = 0; m < M; ++m) acc += chi_sign(tracked[c], m) * fh[m];
    out[c] = acc / M;
  }
  return out;
}

void check_compat(const FourierFunction& h, const EffectiveEnsemble& e) {
  if (h.P != e.P) throw std::invalid_argument("dynamics: target and ensemble dimension differ");
  if (e.P < 1 || e.P > 16) throw std::invalid_argument("dynamics: P out of range");
  if (e.size() == 0) throw std::invalid_argument("dynamics: empty ensemble");
  for (const Particle& p : e.pts)
    if (static_cast<int>(p.u.size()) != e.P)
      throw std::invalid_argument("dynamics: particle dimension mismatch");
}

}  // namespace

EffectiveEnsemble make_ensemble(int P, const QuadratureRule& a_rule, double s0) {
  if (P < 1 || P > 16) throw std::invalid_argument("make_ensemble: P out of range");
  if (s0 < 0.0) throw std::invalid_argument("make_ensemble: s0 must be >= 0");
  EffectiveEnsemble e;
  e.P = P;
  e.w = a_rule.w;
  e.pts.resize(a_rule.x.size());
  for (std::size_t j = 0; j < a_rule.x.size(); ++j) {
    e.pts[j].a = a_rule.x[j];
    e.pts[j].u.assign(P, 0.0);
    e.pts[j].s = s0;
  }
  return e;
}

std::vector<double> effective_predict_all(const EffectiveEnsemble& e, const Activation& act,
                                          const QuadratureRule& hermite) {
  GaussCache c;
  fill_cache(e, act, hermite, c);
  return predict_from_cache(e, c);
}

double effective_predict(const EffectiveEnsemble& e, const Activation& act,
                         const QuadratureRule& hermite, std::uint32_t z_mask) {
  return effective_predict_all(e, act, hermite)[z_mask];
}

double effective_risk(const EffectiveEnsemble& e, const FourierFunction& h,
                      const Activation& act, const QuadratureRule& hermite) {
  check_compat(h, e);
  const std::vector<double> fh = effective_predict_all(e, act, hermite);
  const std::vector<double> hv = h.values_on_hypercube();
  double acc = 0.0;
  for (std::size_t m = 0; m < fh.size(); ++m) {
    const double d = fh[m] - hv[m];
    acc += d * d;
  }
  return acc / static_cast<double>(fh.size());
}

void dfpde_drift(const EffectiveEnsemble& e, const FourierFunction& h, const Activation& act,
                 const QuadratureRule& hermite, double xi_a, double xi_w, double lambda_a,
                 double lambda_w, std::vector<double>& out) {
  check_compat(h, e);
  const int M = 1 << e.P;
  GaussCache c;
  fill_cache(e, act, hermite, c);
  const std::vector<double> fh = predict_from_cache(e, c);
  const std::vector<double> hv = h.values_on_hypercube();
  std::vector<double> r(M);
  for (int m = 0; m < M; ++m) r[m] = hv[m] - fh[m];

  const int stride = e.P + 2;
  out.assign(static_cast<std::size_t>(e.size()) * stride, 0.0);
  for (int j = 0; j < e.size(); ++j) {
    const Particle& p = e.pts[j];
    const std::size_t base = static_cast<std::size_t>(j) * M;
    double ea = 0.0, es = 0.0;
    std::vector<double> eu(e.P, 0.0);
    for (int m = 0; m < M; ++m) {
      const double rm = r[m];
      ea += rm * c.sig[base + m];
      es += rm * c.sigpg[base + m];
      const double rd = rm * c.sigp[base + m];
      for (int i = 0; i < e.P; ++i) eu[i] += ((m >> i) & 1) ? rd : -rd;
    }
    ea /= M;
    es /= M;
    double* o = &out[static_cast<std::size_t>(j) * stride];
    o[0] = xi_a * (ea - lambda_a * p.a);
    for (int i = 0; i < e.P; ++i) o[1 + i] = xi_w * (p.a * eu[i] / M - lambda_w * p.u[i]);
    o[1 + e.P] = xi_w * (p.a * es - lambda_w * p.s);
  }
}

double dfpde_potential(const EffectiveEnsemble& frozen, const Activation& act,
                       const QuadratureRule& hermite, const FourierFunction& h, int j,
                       const std::vector<double>& theta, double lambda_a, double lambda_w) {
  check_compat(h, frozen);
  if (j < 0 || j >= frozen.size()) throw std::invalid_argument("dfpde_potential: bad index");
  if (static_cast<int>(theta.size()) != frozen.P + 2)
    throw std::invalid_argument("dfpde_potential: theta size");
  const int M = 1 << frozen.P;
  const std::vector<double> fh = effective_predict_all(frozen, act, hermite);
  const std::vector<double> hv = h.values_on_hypercube();

  const double a = theta[0];
  const double s = theta[frozen.P + 1];
  double data = 0.0;
  for (int m = 0; m < M; ++m) {
    double inner = 0.0;
    for (int i = 0; i < frozen.P; ++i)
      inner += ((m >> i) & 1) ? theta[1 + i] : -theta[1 + i];
    double sv = 0.0;
    if (s == 0.0) {
      sv = act.value(inner);
    } else {
      for (std::size_t k = 0; k < hermite.x.size(); ++k)
        sv += hermite.w[k] * act.value(inner + s * hermite.x[k]);
    }
    data += (fh[m] - hv[m]) * a * sv;
  }
  data /= M;
  double un2 = 0.0;
  for (int i = 0; i < frozen.P; ++i) un2 += theta[1 + i] * theta[1 + i];
  return data + 0.5 * lambda_a * a * a + 0.5 * lambda_w * (un2 + s * s);
}

DfpdeResult dfpde_integrate(const FourierFunction& h, EffectiveEnsemble e,
                            const Schedules& sch, const Activation& act,
                            const DfpdeOptions& opt) {
  check_compat(h, e);
  if (opt.delta <= 0.0) throw std::invalid_argument("dfpde_integrate: delta must be > 0");
  if (opt.T < 0.0) throw std::invalid_argument("dfpde_integrate: T must be >= 0");
  if (opt.hermite_nodes < 1) throw std::invalid_argument("dfpde_integrate: hermite_nodes");

  const QuadratureRule herm = hermite_rule(opt.hermite_nodes);
  const int M = 1 << e.P;
  const std::vector<double> hv = h.values_on_hypercube();
  const std::vector<std::uint32_t> tracked = opt.tracked.empty() ? h.support() : opt.tracked;

  DfpdeResult res;
  res.trace.tracked = tracked;
  const long long nsteps = std::llround(opt.T / opt.delta);
  const long long rec_stride =
      std::max<long long>(1, std::llround(opt.record_dt / opt.delta));

  GaussCache c;
  std::vector<double> r(M);
  const bool unregularized = sch.lambda_a == 0.0 && sch.lambda_w == 0.0;
  double prev_risk = -1.0;
  bool warned_increase = false;

  for (long long k = 0; k <= nsteps; ++k) {
    fill_cache(e, act, herm, c);
    const std::vector<double> fh = predict_from_cache(e, c);

    if (k % rec_stride == 0 || k == nsteps) {
      double risk = 0.0;
      for (int m = 0; m < M; ++m) {
        const double d = fh[m] - hv[m];
        risk += d * d;
      }
      risk /= M;
      if (!std::isfinite(risk) || risk > kDivergenceRisk) {
        res.diverged = true;
        res.trace.diverged = true;
        res.trace.warnings.push_back("diverged at t=" + format_double(k * opt.delta));
        break;
      }
      res.trace.add(k * opt.delta, risk, 0.0, tracked_coeffs(e.P, fh, tracked));
      if (unregularized && !warned_increase && prev_risk >= 0.0 &&
          risk > 1.1 * prev_risk + 1e-12) {
        res.trace.warnings.push_back("risk increased by more than 10% between records; "
                                     "consider a smaller step");
        warned_increase = true;
      }
      prev_risk = risk;
    }
    if (k == nsteps) break;

    const double t = k * opt.delta;
    const double xa = sch.xi_a(t), xw = sch.xi_w(t);
    for (int m = 0; m < M; ++m) r[m] = hv[m] - fh[m];
    for (int j = 0; j < e.size(); ++j) {
      Particle& p = e.pts[j];
      const std::size_t base = static_cast<std::size_t>(j) * M;
      double ea = 0.0, es = 0.0;
      std::vector<double> eu(e.P, 0.0);
      for (int m = 0; m < M; ++m) {
        const double rm = r[m];
        ea += rm * c.sig[base + m];
        es += rm * c.sigpg[base + m];
        const double rd = rm * c.sigp[base + m];
        for (int i = 0; i < e.P; ++i) eu[i] += ((m >> i) & 1) ? rd : -rd;
      }
      const double a_old = p.a;
      p.a += opt.delta * xa * (ea / M - sch.lambda_a * p.a);
      for (int i = 0; i < e.P; ++i)
        p.u[i] += opt.delta * xw * (a_old * eu[i] / M - sch.lambda_w * p.u[i]);
      p.s += opt.delta * xw * (a_old * es / M - sch.lambda_w * p.s);
      p.s = std::abs(p.s);  // drift is odd in s, so the folded dynamics agree
    }
  }
  res.final = std::move(e);
  return res;
}

void dfpde_step_discrete(EffectiveEnsemble& e, const FourierFunction& h, const Activation& act,
                         const QuadratureRule& hermite, double eta_a, double eta_w,
                         double lambda_a, double lambda_w) {
  check_compat(h, e);
  const int M = 1 << e.P;
  GaussCache c;
  fill_cache(e, act, hermite, c);
  const std::vector<double> fh = predict_from_cache(e, c);
  const std::vector<double> hv = h.values_on_hypercube();
  std::vector<double> r(M);
  for (int m = 0; m < M; ++m) r[m] = hv[m] - fh[m];

  for (int j = 0; j < e.size(); ++j) {
    Particle& p = e.pts[j];
    const std::size_t base = static_cast<std::size_t>(j) * M;
    double ea = 0.0, es = 0.0;
    std::vector<double> eu(e.P, 0.0);
    for (int m = 0; m < M; ++m) {
      const double rm = r[m];
      ea += rm * c.sig[base + m];
      es += rm * c.sigpg[base + m];
      const double rd = rm * c.sigp[base + m];
      for (int i = 0; i < e.P; ++i) eu[i] += ((m >> i) & 1) ? rd : -rd;
    }
    const double a_old = p.a;
    p.a = (1.0 - eta_a * lambda_a) * p.a + eta_a * ea / M;
    for (int i = 0; i < e.P; ++i)
      p.u[i] = (1.0 - eta_w * lambda_w) * p.u[i] + eta_w * a_old * eu[i] / M;
    p.s = std::abs((1.0 - eta_w * lambda_w) * p.s + eta_w * a_old * es / M);
  }
}

BsgdResult bsgd_train(const FourierFunction& h, const Activation& act, const BsgdParams& p) {
  if (p.d < h.P) throw std::invalid_argument("bsgd_train: d must be >= P");
  if (p.N < 1 || p.b < 1 || p.test_m < 1) throw std::invalid_argument("bsgd_train: sizes");
  if (p.eta <= 0.0 || p.steps < 0) throw std::invalid_argument("bsgd_train: schedule");
  const int rec_every = std::max(1, p.record_every);

  Rng rng_init(p.seed.seed, "init");
  Rng rng_data(p.seed.seed, "data");
  Rng rng_test(p.seed.seed, "test-set");

  std::vector<double> a(p.N);
  for (int j = 0; j < p.N; ++j) a[j] = rng_init.uniform(-1.0, 1.0);
  std::vector<std::vector<double>> w(p.N, std::vector<double>(p.d, 0.0));
  if (p.w_init_gauss) {
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(p.d));
    for (int j = 0; j < p.N; ++j)
      for (int i = 0; i < p.d; ++i) w[j][i] = rng_init.normal() * inv_sqrt_d;
  }

  const std::vector<std::uint32_t> tracked = p.tracked.empty() ? h.support() : p.tracked;
  BsgdResult res;
  res.trace.tracked = tracked;

  // fixed evaluation set; targets are noiseless
  std::vector<std::vector<double>> xt(p.test_m);
  std::vector<double> yt(p.test_m);
  res.test_z.resize(p.test_m);
  for (int i = 0; i < p.test_m; ++i) {
    rng_test.rademacher_fill(xt[i], p.d);
    std::uint32_t zm = 0;
    for (int c = 0; c < h.P; ++c)
      if (xt[i][c] > 0.0) zm |= 1u << c;
    yt[i] = h.eval_mask(zm);
    res.test_z[i] = zm;
  }

  std::vector<double> xb(p.d);
  std::vector<double> pre(static_cast<std::size_t>(p.b) * p.N);
  std::vector<double> gmat(static_cast<std::size_t>(p.b) * p.N);
  std::vector<std::vector<double>> xbatch(p.b, std::vector<double>(p.d));
  std::vector<double> yb(p.b), resid(p.b), new_a(p.N);

  auto evaluate = [&](double t) -> bool {
    // returns false on divergence
    double sum = 0.0, sum2 = 0.0;
    std::vector<double> coeff(tracked.size(), 0.0);
    for (int i = 0; i < p.test_m; ++i) {
      double f = 0.0;
      for (int j = 0; j < p.N; ++j) {
        double g = 0.0;
        for (int c = 0; c < p.d; ++c) g += w[j][c] * xt[i][c];
        f += a[j] * act.value(g);
      }
      f /= p.N;
      const double err = f - yt[i];
      sum += err * err;
      sum2 += err * err * err * err;
      for (std::size_t cidx = 0; cidx < tracked.size(); ++cidx) {
        double chi = 1.0;
        for (int c = 0; c < h.P; ++c)
          if (tracked[cidx] & (1u << c)) chi *= xt[i][c];
        coeff[cidx] += chi * f;
      }
    }
    const double risk = sum / p.test_m;
    if (!std::isfinite(risk) || risk > kDivergenceRisk) {
      res.diverged = true;
      res.trace.diverged = true;
      res.trace.warnings.push_back("diverged at t=" + format_double(t));
      return false;
    }
    const double var = std::max(0.0, sum2 / p.test_m - risk * risk);
    for (double& c : coeff) c /= p.test_m;
    res.trace.add(t, risk, std::sqrt(var / p.test_m), std::move(coeff));
    return true;
  };

  for (int k = 0; k <= p.steps; ++k) {
    const double t = k * p.eta;
    if (k % rec_every == 0 || k == p.steps)
      if (!evaluate(t)) break;
    if (k == p.steps) break;

    for (int i = 0; i < p.b; ++i) {
      rng_data.rademacher_fill(xbatch[i], p.d);
      std::uint32_t zm = 0;
      for (int c = 0; c < h.P; ++c)
        if (xbatch[i][c] > 0.0) zm |= 1u << c;
      yb[i] = h.eval_mask(zm);
      if (p.noise_std > 0.0) yb[i] += p.noise_std * rng_data.normal();
    }
    for (int i = 0; i < p.b; ++i) {
      double f = 0.0;
      for (int j = 0; j < p.N; ++j) {
        double g = 0.0;
        const double* wj = w[j].data();
        const double* xi = xbatch[i].data();
        for (int c = 0; c < p.d; ++c) g += wj[c] * xi[c];
        gmat[static_cast<std::size_t>(i) * p.N + j] = g;
        const double v = act.value(g);
        pre[static_cast<std::size_t>(i) * p.N + j] = v;
        f += a[j] * v;
      }
      resid[i] = yb[i] - f / p.N;
    }
    const double ha = p.eta * p.sch.xi_a(t);
    const double hw = p.eta * p.sch.xi_w(t);
    for (int j = 0; j < p.N; ++j) {
      double ga = 0.0;
      for (int i = 0; i < p.b; ++i) ga += resid[i] * pre[static_cast<std::size_t>(i) * p.N + j];
      new_a[j] = a[j] + ha * (ga / p.b - p.sch.lambda_a * a[j]);
    }
    for (int j = 0; j < p.N; ++j) {
      double* wj = w[j].data();
      if (p.sch.lambda_w != 0.0) {
        const double shrink = 1.0 - hw * p.sch.lambda_w;
        for (int c = 0; c < p.d; ++c) wj[c] *= shrink;
      }
      const double scale = hw * a[j] / p.b;  // second layer frozen at time k
      for (int i = 0; i < p.b; ++i) {
        const double coef = scale * resid[i] * act.deriv(gmat[static_cast<std::size_t>(i) * p.N + j]);
        const double* xi = xbatch[i].data();
        for (int c = 0; c < p.d; ++c) wj[c] += coef * xi[c];
      }
    }
    a = new_a;
  }

  res.a = std::move(a);
  res.w = std::move(w);
  return res;
}

}  // namespace msplab
