#include "core/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "core/bits.hpp"
#include "core/bounds.hpp"
#include "core/quadrature.hpp"
#include "core/recurrence.hpp"
#include "core/trace.hpp"
#include "core/twophase.hpp"

namespace msplab {
namespace {

struct PresetDef {
  const char* name;
  const char* text;
};

const PresetDef kPresetDefs[] = {
    {"msp-h2", R"(kind = msp-check
name = msp-h2

[target]
P = 3
S = 1 alpha=1
S = 1,2 alpha=1
S = 1,2,3 alpha=1
)"},
    {"fig1", R"(kind = fig1-compare
name = fig1
seed = 1
seeds = 5

[target]
P = 4
S = 1 alpha=1
S = 1,2 alpha=1
S = 1,2,3 alpha=1
S = 1,2,3,4 alpha=1

[activation]
kind = shifted-sigmoid
shift = 2.5

[dynamics]
d = 100
N = 100
b = 150
eta = 0.5
T = 800
delta = 0.01
record_dt = 1
record_every = 2
s0 = 1
w_init = gauss
test_m = 300
nodes = 64
)"},
    {"appA-h1", R"(kind = stuck-dynamics
name = appA-h1
seed = 1

[target]
P = 4
S = 1 alpha=1
S = 1,2 alpha=1
S = 3 alpha=1
S = 1,2,3,4 alpha=1

[activation]
kind = shifted-sigmoid
shift = 1

[dynamics]
T = 60
delta = 0.01
record_dt = 0.5
s0 = 1
nodes = 64
)"},
    {"appA-h2", R"(kind = stuck-dynamics
name = appA-h2
seed = 1

[target]
P = 4
S = 1 alpha=1
S = 1,2 alpha=1
S = 2,3 alpha=1
S = 3,4 alpha=1
S = 1,2,3,4 alpha=1

[activation]
kind = shifted-sigmoid
shift = 1

[dynamics]
T = 60
delta = 0.01
record_dt = 0.5
s0 = 1
nodes = 64
)"},
    {"appA-h3", R"(kind = stuck-dynamics
name = appA-h3
seed = 1

[target]
P = 4
S = 1 alpha=1
S = 1,2 alpha=1
S = 3 alpha=1
S = 3,4 alpha=1

[activation]
kind = shifted-sigmoid
shift = 1

[dynamics]
T = 60
delta = 0.01
record_dt = 0.5
s0 = 1
nodes = 64
)"},
    {"appA-h4", R"(kind = stuck-dynamics
name = appA-h4
seed = 1

[target]
P = 3
S = 1 alpha=1
S = 2 alpha=1
S = 3 alpha=1
S = 1,2,3 alpha=1

[activation]
kind = shifted-sigmoid
shift = 1

[dynamics]
T = 60
delta = 0.01
record_dt = 0.5
s0 = 1
nodes = 64
)"},
    {"appA-h4tilde", R"(kind = stuck-dynamics
name = appA-h4tilde
seed = 1

[target]
P = 3
S = 1 alpha=1
S = 2 alpha=0.99
S = 3 alpha=1.01
S = 1,2,3 alpha=1

[activation]
kind = shifted-sigmoid
shift = 1

[dynamics]
T = 200
delta = 0.01
record_dt = 1
s0 = 1
nodes = 64
)"},
    {"fig4-leap2", R"(kind = symmetry-escape
name = fig4-leap2
seed = 1

[target]
P = 4
S = 1 alpha=1
S = 1,2,3 alpha=1
S = 1,2,3,4 alpha=1

[activation]
kind = shifted-sigmoid
shift = 0.5

[dynamics]
d = 25
N = 100
b = 25
eta = 0.5
T = 40
steps = 600
delta = 0.01
record_dt = 0.5
record_every = 2
s0 = 1
w_init = gauss
test_m = 300
nodes = 64

[escape]
set = 1,2,3
level = 0.25
reference_exponent = 2
)"},
    {"fig4-leap3", R"(kind = symmetry-escape
name = fig4-leap3
seed = 1

[target]
P = 4
S = 1 alpha=1
S = 1,2,3,4 alpha=1

[activation]
kind = shifted-sigmoid
shift = 0.5

[dynamics]
d = 20
N = 100
b = 20
eta = 0.5
T = 40
steps = 1500
delta = 0.01
record_dt = 0.5
record_every = 5
s0 = 1
w_init = gauss
test_m = 300
nodes = 64

[escape]
set = 1,2,3,4
level = 0.25
reference_exponent = 2.7
)"},
    {"two-phase-p2", R"(kind = two-phase-certify
name = two-phase-p2
seed = 1

[target]
P = 2
S = 1 alpha=1
S = 1,2 alpha=1

[activation]
kind = shifted-sigmoid
shift = 0.5

[twophase]
T1 = 0.1
target_risk = 0.001
delta = 0.0005
nodes = 64
)"},
    {"two-phase-p3", R"(kind = two-phase-certify
name = two-phase-p3
seed = 1

[target]
P = 3
S = 1 alpha=1
S = 1,2 alpha=1
S = 1,2,3 alpha=1

[activation]
kind = shifted-sigmoid
shift = 0.5

[twophase]
T1 = 0.1
target_risk = 0.001
delta = 0.0005
nodes = 64
)"},
    {"recurrence-default", R"(kind = recurrence-verify
name = recurrence-default
seed = 1

[recurrence]
L = 4
k1 = 4
eta = 0.05
trials = 20
)"},
    {"lower-bound-default", R"(kind = lower-bound-sweep
name = lower-bound-default

[bounds]
d_list = 10,20,40,80
k = 3
terms = 1
P = 4
slack = 0.5
)"},
};

namespace fs = std::filesystem;

void emit(RunResult& r, const std::string& dir, const std::string& name,
          const std::string& content) {
  fs::create_directories(dir);
  std::string path = (fs::path(dir) / name).string();
  write_file(path, content);
  r.files.push_back(path);
}

std::string fmt_set(std::uint32_t mask) { return "{" + set_to_string(mask) + "}"; }

std::string fmt_sets(const std::vector<std::uint32_t>& sets, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (i) out += sep;
    out += fmt_set(sets[i]);
  }
  return out;
}

std::uint64_t root_seed(const Config& c) { return c.get_u64_or("", "seed", 1); }

std::vector<std::pair<std::string, std::string>> common_meta(const Config& c,
                                                             const FourierFunction& h,
                                                             const Activation& act) {
  return {{"name", c.get_or("", "name", c.get_or("", "kind", ""))},
          {"target", fmt_sets(h.support(), " ")},
          {"activation", act.describe()}};
}

int col_of(const std::vector<std::uint32_t>& tracked, std::uint32_t mask) {
  auto it = std::find(tracked.begin(), tracked.end(), mask);
  if (it == tracked.end()) throw ConfigError("tracked set " + fmt_set(mask) + " not in target");
  return static_cast<int>(it - tracked.begin());
}

// ---------------------------------------------------------------- msp-check

RunResult run_msp_check(const Config& c, const std::string& dir) {
  RunResult r;
  FourierFunction h = target_from_config(c);
  MspResult m = msp_check(h);
  std::ostringstream rep;
  rep << msp_report(m) << "\n";
  if (h.P <= 8) {
    auto syms = detect_symmetries(h);
    rep << "coefficient symmetries: " << syms.size() << "\n";
  }
  r.report = rep.str();
  emit(r, dir, "msp_report.txt", r.report);
  emit(r, dir, "target.txt", fourier_format(h));
  return r;
}

// ------------------------------------------------------------- plain trains

RunResult run_train_dfpde(const Config& c, const std::string& dir) {
  RunResult r;
  FourierFunction h = target_from_config(c);
  Activation act = activation_from_config(c);
  DfpdeResult res = dfpde_integrate(h, ensemble_from_config(c, h), schedules_from_config(c),
                                    act, dfpde_options_from_config(c));
  emit(r, dir, "trace.csv", trace_csv(res.trace));
  emit(r, dir, "target.txt", fourier_format(h));
  auto kv = common_meta(c, h, act);
  kv.emplace_back("final_risk", format_double(res.trace.risk.back()));
  kv.emplace_back("diverged", res.diverged ? "yes" : "no");
  for (const auto& w : res.trace.warnings) kv.emplace_back("warning", w);
  emit(r, dir, "meta.txt", meta_text(kv));
  std::ostringstream rep;
  rep << "effective dynamics: final risk " << format_double(res.trace.risk.back()) << " at t="
      << format_double(res.trace.t.back()) << "\n";
  if (res.diverged) {
    rep << "diverged; partial trace saved\n";
    r.exit_code = 3;
  }
  r.report = rep.str();
  return r;
}

RunResult run_train_sgd(const Config& c, const std::string& dir) {
  RunResult r;
  FourierFunction h = target_from_config(c);
  Activation act = activation_from_config(c);
  BsgdResult res = bsgd_train(h, act, bsgd_params_from_config(c, root_seed(c)));
  emit(r, dir, "trace.csv", trace_csv(res.trace));
  emit(r, dir, "target.txt", fourier_format(h));
  auto kv = common_meta(c, h, act);
  kv.emplace_back("seed", std::to_string(root_seed(c)));
  kv.emplace_back("final_risk", format_double(res.trace.risk.back()));
  kv.emplace_back("diverged", res.diverged ? "yes" : "no");
  for (const auto& w : res.trace.warnings) kv.emplace_back("warning", w);
  emit(r, dir, "meta.txt", meta_text(kv));
  std::ostringstream rep;
  rep << "SGD: final risk " << format_double(res.trace.risk.back()) << " at t="
      << format_double(res.trace.t.back()) << "\n";
  if (res.diverged) {
    rep << "diverged; partial trace saved\n";
    r.exit_code = 3;
  }
  r.report = rep.str();
  return r;
}

// ------------------------------------------------------------- fig1-compare

RunResult run_fig1_compare(const Config& c, const std::string& dir) {
  RunResult r;
  FourierFunction h = target_from_config(c);
  Activation act = activation_from_config(c);
  const int seeds = static_cast<int>(c.get_int_or("", "seeds", 5));
  const std::uint64_t seed0 = root_seed(c);
  DfpdeOptions opt = dfpde_options_from_config(c);

  // keep per-record ensembles so both dynamics can be scored on the same
  // finite test set; SGD records must land on the same time grid
  ChunkedRun pde = dfpde_chunked(h, ensemble_from_config(c, h), schedules_from_config(c), act,
                                 opt, 0, {}, 0.0, /*keep_snapshots=*/true);
  emit(r, dir, "dfpde_trace.csv", trace_csv(pde.trace));

  QuadratureRule hermite = hermite_rule(opt.hermite_nodes);
  std::vector<std::vector<double>> predictions(pde.snapshots.size());
  for (std::size_t i = 0; i < pde.snapshots.size(); ++i)
    predictions[i] = effective_predict_all(pde.snapshots[i], act, hermite);

  std::ostringstream rep;
  rep << "effective dynamics: final risk " << format_double(pde.trace.risk.back()) << "\n";

  // coefficient 0.5-crossings, columns ordered as in the trace header
  rep << "crossings of 0.5:";
  std::vector<double> cross;
  for (std::size_t j = 0; j < pde.trace.tracked.size(); ++j) {
    double tc = pde.trace.first_crossing(j, 0.5);
    cross.push_back(tc);
    rep << " " << fmt_set(pde.trace.tracked[j]) << "@" << format_double(tc);
  }
  bool ordered = true;
  for (std::size_t j = 1; j < cross.size(); ++j)
    if (cross[j - 1] < 0 || cross[j] < 0 || cross[j] <= cross[j - 1]) ordered = false;
  rep << (ordered ? "  (sequential)" : "  (not sequential)") << "\n";

  bool any_diverged = pde.diverged;
  double gap_sum = 0.0, gap_max = 0.0;
  for (int k = 0; k < seeds; ++k) {
    BsgdResult sgd = bsgd_train(h, act, bsgd_params_from_config(c, seed0 + k));
    emit(r, dir, "sgd_trace_" + std::to_string(k) + ".csv", trace_csv(sgd.trace));
    const double gap = shared_measure_gap(predictions, sgd);
    gap_sum += gap;
    gap_max = std::max(gap_max, gap);
    any_diverged = any_diverged || sgd.diverged;
    rep << "seed " << seed0 + k << ": final risk " << format_double(sgd.trace.risk.back())
        << ", sup coefficient gap vs effective " << format_double(gap) << "\n";
  }
  rep << "mean gap " << format_double(gap_sum / seeds) << ", max gap "
      << format_double(gap_max) << "\n";
  if (any_diverged) {
    rep << "divergence encountered; partial traces saved\n";
    r.exit_code = 3;
  }
  emit(r, dir, "target.txt", fourier_format(h));
  r.report = rep.str();
  emit(r, dir, "summary.txt", r.report);
  return r;
}

// ------------------------------------------------------------ stuck-dynamics

RunResult run_stuck_dynamics(const Config& c, const std::string& dir) {
  RunResult r;
  FourierFunction h = target_from_config(c);
  Activation act = activation_from_config(c);
  MspResult m = msp_check(h);
  std::vector<std::vector<int>> syms = h.P <= 8 ? detect_symmetries(h)
                                                : std::vector<std::vector<int>>{};

  ChunkedRun run = dfpde_chunked(h, ensemble_from_config(c, h), schedules_from_config(c), act,
                                 dfpde_options_from_config(c), m.blocked_mask, syms,
                                 m.stuck_risk_lower_bound);
  emit(r, dir, "trace.csv", trace_csv(run.trace));
  emit(r, dir, "target.txt", fourier_format(h));

  std::ostringstream rep;
  rep << msp_report(m) << "\n";
  rep << "final risk " << format_double(run.trace.risk.back()) << " at t="
      << format_double(run.trace.t.back()) << "\n";
  if (!m.is_msp) {
    rep << "stuck risk lower bound " << format_double(m.stuck_risk_lower_bound)
        << ", min margin over run " << format_double(run.min_risk_margin) << "\n";
    rep << "max |u_i| over blocked coordinates, whole run: " << format_double(run.max_blocked)
        << "\n";
  }
  for (std::size_t s = 0; s < syms.size(); ++s) {
    rep << "symmetry (";
    for (int i = 0; i < h.P; ++i) rep << (i ? " " : "") << syms[s][i] + 1;
    rep << "): max gap " << format_double(run.max_sym_gap[s]) << "\n";
  }
  if (run.diverged) {
    rep << "diverged; partial trace saved\n";
    r.exit_code = 3;
  }
  r.report = rep.str();
  emit(r, dir, "stuck_report.txt", r.report);
  return r;
}

// --------------------------------------------------------- two-phase-certify

RunResult run_two_phase(const Config& c, const std::string& dir) {
  RunResult r;
  FourierFunction h = c.has("target", "P") || c.has("target", "preset")
                          ? target_from_config(c)
                          : make_fourier(2, {{0b01, 1.0}, {0b11, 1.0}});
  Activation act = activation_from_config(c);
  const double target_risk = c.get_double_or("twophase", "target_risk", 1e-3);
  const double delta = c.get_double_or("twophase", "delta", 5e-4);
  const int nodes = static_cast<int>(c.get_int_or("twophase", "nodes", 64));
  QuadratureRule a_rule = legendre_rule(nodes);

  std::vector<double> ladder;
  if (c.has("twophase", "T1_ladder"))
    ladder = parse_double_list(c.get("twophase", "T1_ladder"));
  else
    ladder.push_back(c.get_double_or("twophase", "T1", 0.1));
  if (ladder.empty()) throw ConfigError("T1_ladder is empty");

  std::ostringstream rep;
  std::vector<double> lam;
  for (double T1 : ladder) {
    CertifyReport cr = two_phase_certify(h, act, T1, a_rule, delta, target_risk);
    lam.push_back(cr.lambda_min);
    rep << certify_report_text(cr) << "\n";
  }

  // log-log slope of lambda_min against T1 when a ladder was given
  if (ladder.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      if (!(lam[i] > 1e-300)) continue;
      const double x = std::log(ladder[i]), y = std::log(lam[i]);
      sx += x; sy += y; sxx += x * x; sxy += x * y; ++n;
    }
    if (n >= 2) {
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      rep << "lambda_min ladder slope (log-log): " << format_double(slope) << "\n";
    } else {
      rep << "lambda_min ladder slope: not measurable (eigenvalues underflow)\n";
    }
  }

  // kernel, spectrum and phase-2 trace at the largest T1
  const double T1 = *std::max_element(ladder.begin(), ladder.end());
  FirstLayerMap map = phase1(h, act, T1, a_rule, delta, Phase1Variant::Full);
  KernelMatrix K = kernel_matrix(map, act);
  emit(r, dir, "kernel.csv", kernel_csv(K));
  emit(r, dir, "gram.csv", gram_csv(h.P, gram_monomial_matrix(h.P)));
  KernelSpectrum spec = kernel_operator_spectrum(map, act);
  std::ostringstream sp;
  sp << "operator eigenvalues (ascending):\n";
  for (double v : spec.eigenvalues) sp << format_double(v) << "\n";
  emit(r, dir, "spectrum.txt", sp.str());

  const double lam_min = spec.eigenvalues.front();
  double T2 = T1 + 1.0;
  Phase2Result p2;
  const double risk_t1 = [&] {
    // residual at the phase boundary
    Phase2Result probe = phase2(K, h, map, act, T1, 1.0, Phase2Mode::Exact);
    return probe.trace.risk.front();
  }();
  if (lam_min > 1e-300 && risk_t1 > target_risk)
    T2 = T1 + std::log(risk_t1 / target_risk) / lam_min;
  p2 = phase2(K, h, map, act, T2, (T2 - T1) / 50.0, Phase2Mode::Exact);
  emit(r, dir, "phase2_trace.csv", trace_csv(p2.trace));
  emit(r, dir, "target.txt", fourier_format(h));

  r.report = rep.str();
  emit(r, dir, "certify.txt", r.report);
  return r;
}

// -------------------------------------------------------- recurrence-verify

double fit_slope(const std::vector<double>& t, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(t.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log(t[i]), y = std::log(std::max(err[i], 1e-300));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Euler with Richardson extrapolation to push the integrator error below the
// Taylor remainder being measured
std::vector<double> integrate_richardson(const FourierFunction& h, const Activation& act,
                                         double a, double T1) {
  const double delta = T1 / 4000.0;
  std::vector<double> u1 = simplified_integrate(h, act, a, T1, delta);
  std::vector<double> u2 = simplified_integrate(h, act, a, T1, delta / 2.0);
  for (std::size_t i = 0; i < u1.size(); ++i) u2[i] = 2.0 * u2[i] - u1[i];
  return u2;
}

struct RecCheck {
  std::string label;
  bool pass = false;
  std::string detail;
};

RecCheck check_continuous_ladder(const FourierFunction& h, const Activation& act, int L,
                                 double a) {
  CoeffTable tab = continuous_coeff_table(h, act.taylor_upto(L + 1), L);
  const std::vector<double> ts = {0.1, 0.05, 0.025};
  std::vector<double> errs;
  for (double t : ts) {
    std::vector<double> u = integrate_richardson(h, act, a, t);
    double e = 0.0;
    for (int i = 1; i <= h.P; ++i) {
      double pred = 0.0;
      for (int l = 1; l <= L; ++l) pred += std::pow(a * t, l) * tab.at(i, l);
      e = std::max(e, std::fabs(u[i - 1] - pred));
    }
    errs.push_back(e);
  }
  RecCheck out;
  out.label = "continuous " + fmt_sets(h.support(), ",");
  if (*std::max_element(errs.begin(), errs.end()) < 1e-14) {
    out.pass = true;
    out.detail = "remainder below measurement floor";
    return out;
  }
  const double slope = fit_slope(ts, errs);
  out.pass = slope >= L - 0.5;
  out.detail = "remainder slope " + format_double(slope) + " (need >= " +
               format_double(L - 0.5) + ")";
  return out;
}

RecCheck check_discrete_identity(const FourierFunction& h, const Activation& act, double eta,
                                 int k1) {
  const int P = h.P;
  const int M = 1 << P;
  EffectiveEnsemble e = make_ensemble(P, legendre_rule(16), 0.0);
  QuadratureRule herm = hermite_rule(21);
  std::vector<std::vector<double>> xi;
  for (int k = 0; k < k1; ++k) {
    std::vector<double> fv = effective_predict_all(e, act, herm);
    std::vector<double> res(M);
    for (int z = 0; z < M; ++z) res[z] = h.eval_mask(z) - fv[z];
    FourierFunction rf = walsh_transform(P, res);
    std::vector<double> row(M, 0.0);
    for (int s = 0; s < M; ++s) row[s] = rf.alpha(s);
    xi.push_back(std::move(row));
    dfpde_step_discrete(e, h, act, herm, 0.0, eta, 0.0, 0.0);
  }
  const std::vector<double> rho = act.taylor_upto(static_cast<int>(act.coeffs().size()) + 1);
  double maxerr = 0.0;
  for (int j : {0, e.size() / 2, e.size() - 1}) {
    auto table = discrete_coeff_eval(P, xi, rho, eta * e.pts[j].a, k1);
    for (int i = 1; i <= P; ++i)
      maxerr = std::max(maxerr, std::fabs(table[k1][i - 1] - e.pts[j].u[i - 1]));
  }
  RecCheck out;
  out.label = "discrete " + fmt_sets(h.support(), ",");
  out.pass = maxerr <= 1e-9;
  out.detail = "max |table - integrator| = " + format_double(maxerr);
  return out;
}

RecCheck check_leading_order(int k, const Activation& act, double a) {
  // vanilla staircase of depth k, unit coefficients
  std::vector<std::pair<std::uint32_t, double>> terms;
  std::vector<double> alpha;
  for (int i = 1; i <= k; ++i) {
    terms.emplace_back((1u << i) - 1u, 1.0);
    alpha.push_back(1.0);
  }
  FourierFunction h = make_fourier(k, std::move(terms));
  const std::vector<double> m = act.taylor_upto(k);
  const std::vector<double> ts = {0.2, 0.1, 0.05};
  std::vector<double> errs;
  for (double t : ts) {
    std::vector<double> u = integrate_richardson(h, act, a, t);
    errs.push_back(std::fabs(u[k - 1] - vanilla_leading_order(alpha, m, k, a, t)));
  }
  RecCheck out;
  out.label = "leading order k=" + std::to_string(k);
  const double slope = fit_slope(ts, errs);
  const double need = std::pow(2.0, k - 1) + 0.5;
  out.pass = slope >= need;
  out.detail = "error slope " + format_double(slope) + " (need >= " + format_double(need) + ")";
  return out;
}

FourierFunction random_target(int P, Rng& rng) {
  std::vector<std::pair<std::uint32_t, double>> terms;
  for (std::uint32_t m = 1; m < (1u << P); ++m)
    if (rng.uniform01() < 0.5) terms.emplace_back(m, rng.uniform(-1.0, 1.0));
  if (terms.empty()) terms.emplace_back(1u, 1.0);
  return make_fourier(P, std::move(terms));
}

Activation random_polynomial_activation(Rng& rng, int degree) {
  std::vector<double> m(degree + 1);
  for (double& v : m) v = rng.uniform(-1.0, 1.0);
  m[1] = rng.uniform(0.5, 1.5);  // keep the linear route alive
  return Activation::polynomial(m);
}

RunResult run_recurrence_verify(const Config& c, const std::string& dir) {
  RunResult r;
  const int L = static_cast<int>(c.get_int_or("recurrence", "L", 4));
  const int k1 = static_cast<int>(c.get_int_or("recurrence", "k1", 4));
  const double eta = c.get_double_or("recurrence", "eta", 0.05);
  const int trials = static_cast<int>(c.get_int_or("recurrence", "trials", 20));
  if (k1 > 8 || eta > 0.05 + 1e-12) throw ConfigError("recurrence: need k1 <= 8, eta <= 0.05");
  Rng rng(root_seed(c), "recurrence");

  std::vector<RecCheck> checks;

  // continuous Taylor ladder on a few fixed structures with random coefficients
  const std::vector<SetStructure> shapes = {
      {2, {0b01, 0b11}},
      {3, {0b001, 0b011, 0b111}},
      {3, {0b001, 0b010, 0b111}},
  };
  for (const auto& s : shapes) {
    FourierFunction h = random_msp_function(s, 0.5, 1.5, rng);
    checks.push_back(check_continuous_ladder(h, random_polynomial_activation(rng, L + 1), L,
                                             0.8));
  }

  // discrete identity on random targets and random polynomial activations
  for (int t = 0; t < trials; ++t) {
    const int P = 2 + static_cast<int>(rng.next_u64() % 2);
    FourierFunction h = random_target(P, rng);
    checks.push_back(check_discrete_identity(h, random_polynomial_activation(rng, 4), eta, k1));
  }

  // closed-form leading order for vanilla staircases
  Activation sig = Activation::shifted_sigmoid(0.5);
  for (int k = 1; k <= 3; ++k) checks.push_back(check_leading_order(k, sig, 0.9));

  // order exponents and blocked rows
  {
    RecCheck oc;
    oc.label = "order exponents";
    OrderExponents v3 = order_exponents({3, {0b001, 0b011, 0b111}});
    OrderExponents mix = order_exponents({3, {0b001, 0b010, 0b111}});
    bool ok = v3.o == std::vector<int>{1, 2, 4} && mix.o == std::vector<int>{1, 1, 3};
    CoeffTable blocked = continuous_coeff_table(make_fourier(3, {{0b111, 1.0}}),
                                                sig.taylor_upto(L + 1), L);
    double mx = 0.0;
    for (int i = 1; i <= 3; ++i)
      for (int l = 1; l <= L; ++l) mx = std::max(mx, std::fabs(blocked.at(i, l)));
    ok = ok && mx <= 1e-14;
    oc.pass = ok;
    oc.detail = "vanilla (1,2,4), mixed (1,1,3), blocked table max " + format_double(mx);
    checks.push_back(oc);
  }

  std::ostringstream rep;
  bool all = true;
  for (const auto& ch : checks) {
    rep << (ch.pass ? "pass" : "FAIL") << "  " << ch.label << ": " << ch.detail << "\n";
    all = all && ch.pass;
  }
  rep << (all ? "all recurrence checks passed\n" : "recurrence checks FAILED\n");
  r.report = rep.str();
  r.exit_code = all ? 0 : 4;
  emit(r, dir, "recurrence_report.txt", r.report);

  CoeffTable tab = continuous_coeff_table(
      make_fourier(3, {{0b001, 1.0}, {0b011, 1.0}, {0b111, 1.0}}), sig.taylor_upto(7), 6);
  emit(r, dir, "coeff_table.csv", coeff_table_csv(tab));
  return r;
}

// -------------------------------------------------------- lower-bound-sweep

RunResult run_lower_bound_sweep(const Config& c, const std::string& dir) {
  RunResult r;
  std::vector<double> d_list = {10, 20, 40, 80};
  if (c.has("bounds", "d_list")) d_list = parse_double_list(c.get("bounds", "d_list"));
  const int k = static_cast<int>(c.get_int_or("bounds", "k", 3));
  const int terms = static_cast<int>(c.get_int_or("bounds", "terms", 1));
  const int P = static_cast<int>(c.get_int_or("bounds", "P", 4));
  const double slack = c.get_double_or("bounds", "slack", 0.5);

  std::ostringstream csv;
  csv << "family,d,value,degenerate\n";
  std::ostringstream rep;
  for (double dd : d_list) {
    const int d = static_cast<int>(dd);
    BoundReport pb = polyk_bound(d, k, terms, slack);
    csv << "poly" << k << "," << d << "," << format_double(pb.value) << ","
        << (pb.degenerate ? 1 : 0) << "\n";
    if (2 * P <= d) {
      BoundReport sb = staircase_bound(d, P, slack);
      csv << "staircase," << d << "," << format_double(sb.value) << ","
          << (sb.degenerate ? 1 : 0) << "\n";
    }
  }
  rep << "spot values: poly-k(d=4,k=2,terms=1,slack=1) = "
      << format_double(polyk_bound(4, 2, 1, 1.0).value)
      << ", staircase(d=10,P=4,slack=1) = " << format_double(staircase_bound(10, 4, 1.0).value)
      << "\n";

  // permutation-class Gram demo: degree-floor window for a depth-3 staircase
  {
    const double a = 1.0 / std::sqrt(3.0);
    FourierFunction h = make_fourier(3, {{0b001, a}, {0b011, a}, {0b111, a}});
    PermutedClassGram g = gram_permuted_class(h, 6, 1, false);
    const double avg = average_row_inner(g);
    double closed = 0.0;  // (1/P) sum_{i>=1} 1/C(d,i)
    for (int i = 1; i <= 3; ++i) closed += 1.0 / binom(6, i);
    closed /= 3.0;
    rep << "permutation-class average row inner product (d=6 staircase): "
        << format_double(avg) << " vs closed form " << format_double(closed) << "\n";
  }

  r.report = rep.str();
  emit(r, dir, "bounds.csv", csv.str());
  emit(r, dir, "bounds_report.txt", r.report);
  return r;
}

// --------------------------------------------------------- symmetry-escape

RunResult run_symmetry_escape(const Config& c, const std::string& dir) {
  RunResult r;
  FourierFunction h = target_from_config(c);
  Activation act = activation_from_config(c);
  MspResult m = msp_check(h);

  ChunkedRun pde = dfpde_chunked(h, ensemble_from_config(c, h), schedules_from_config(c), act,
                                 dfpde_options_from_config(c), m.blocked_mask, {},
                                 m.stuck_risk_lower_bound);
  emit(r, dir, "dfpde_trace.csv", trace_csv(pde.trace));

  BsgdParams bp = bsgd_params_from_config(c, root_seed(c));
  BsgdResult sgd = bsgd_train(h, act, bp);
  emit(r, dir, "sgd_trace.csv", trace_csv(sgd.trace));
  emit(r, dir, "target.txt", fourier_format(h));

  std::uint32_t esc_mask = h.support().back();
  if (c.has("escape", "set")) {
    esc_mask = 0;
    for (double v : parse_double_list(c.get("escape", "set")))
      esc_mask |= 1u << (static_cast<int>(v) - 1);
  }
  const double level = c.get_double_or("escape", "level", 0.25);
  const double ref_exp = c.get_double_or("escape", "reference_exponent", 2.0);

  const int col = col_of(sgd.trace.tracked, esc_mask);
  const double t_pde = pde.trace.first_crossing(static_cast<std::size_t>(col), level);
  const double t_sgd = sgd.trace.first_crossing(static_cast<std::size_t>(col), level);

  std::ostringstream rep;
  rep << msp_report(m) << "\n";
  rep << "watched set " << fmt_set(esc_mask) << ", level " << format_double(level) << "\n";
  rep << "effective dynamics crossing: "
      << (t_pde < 0 ? std::string("never (max blocked |u| ") + format_double(pde.max_blocked) +
                          ")"
                    : "t=" + format_double(t_pde))
      << "\n";
  if (t_sgd < 0) {
    rep << "SGD crossing: not reached within " << bp.steps << " steps ("
        << format_double(bp.steps * static_cast<double>(bp.b)) << " samples)\n";
  } else {
    const long long step = std::llround(t_sgd / bp.eta);
    const double n = static_cast<double>(step) * bp.b;
    rep << "SGD crossing: t=" << format_double(t_sgd) << " (step " << step << ", "
        << format_double(n) << " samples, d^" << format_double(ref_exp) << " = "
        << format_double(std::pow(bp.d, ref_exp)) << ", ratio "
        << format_double(n / std::pow(bp.d, ref_exp)) << ")\n";
  }
  rep << "SGD final risk " << format_double(sgd.trace.risk.back()) << "\n";
  if (pde.diverged || sgd.diverged) {
    rep << "divergence encountered; partial traces saved\n";
    r.exit_code = 3;
  }
  r.report = rep.str();
  emit(r, dir, "escape_report.txt", r.report);
  return r;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresetDefs) out.push_back(p.name);
  return out;
}

Config preset_config(const std::string& name) {
  for (const auto& p : kPresetDefs)
    if (name == p.name) return config_parse(p.text);
  throw ConfigError("unknown preset: " + name);
}

FourierFunction target_from_config(const Config& c) {
  if (auto pre = c.find("target", "preset")) return target_from_config(preset_config(*pre));
  if (!c.has("target", "P"))
    throw ConfigError("config needs a [target] section with P and S lines");
  std::string text = "P=" + c.get("target", "P") + "\n";
  for (const auto& s : c.find_all("target", "S")) text += "S=" + s + "\n";
  try {
    return fourier_parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad [target]: ") + e.what());
  }
}

Schedules schedules_from_config(const Config& c) {
  Schedules s;
  const double xa = c.get_double_or("dynamics", "xi_a", 1.0);
  const double xw = c.get_double_or("dynamics", "xi_w", 1.0);
  s.xi_a = [xa](double) { return xa; };
  s.xi_w = [xw](double) { return xw; };
  s.lambda_a = c.get_double_or("dynamics", "lambda_a", 0.0);
  s.lambda_w = c.get_double_or("dynamics", "lambda_w", 0.0);
  return s;
}

EffectiveEnsemble ensemble_from_config(const Config& c, const FourierFunction& h) {
  const int nodes = static_cast<int>(c.get_int_or("dynamics", "nodes", 64));
  const double s0 = c.get_double_or("dynamics", "s0", 1.0);
  return make_ensemble(h.P, legendre_rule(nodes), s0);
}

DfpdeOptions dfpde_options_from_config(const Config& c) {
  DfpdeOptions o;
  o.T = c.get_double_or("dynamics", "T", 10.0);
  o.delta = c.get_double_or("dynamics", "delta", 0.01);
  o.record_dt = c.get_double_or("dynamics", "record_dt", 0.1);
  o.hermite_nodes = static_cast<int>(c.get_int_or("dynamics", "hermite_nodes", 21));
  return o;
}

BsgdParams bsgd_params_from_config(const Config& c, std::uint64_t seed) {
  BsgdParams p;
  p.d = static_cast<int>(c.get_int_or("dynamics", "d", 100));
  p.N = static_cast<int>(c.get_int_or("dynamics", "N", 100));
  p.b = static_cast<int>(c.get_int_or("dynamics", "b", 150));
  p.eta = c.get_double_or("dynamics", "eta", 0.5);
  if (c.has("dynamics", "steps"))
    p.steps = static_cast<int>(c.get_int("dynamics", "steps"));
  else
    p.steps = static_cast<int>(std::llround(c.get_double_or("dynamics", "T", 10.0) / p.eta));
  p.record_every = static_cast<int>(c.get_int_or("dynamics", "record_every", 1));
  p.test_m = static_cast<int>(c.get_int_or("dynamics", "test_m", 300));
  p.noise_std = c.get_double_or("dynamics", "noise_std", 0.0);
  const std::string wi = c.get_or("dynamics", "w_init", "gauss");
  if (wi != "gauss" && wi != "zero") throw ConfigError("w_init must be gauss or zero");
  p.w_init_gauss = wi == "gauss";
  p.sch = schedules_from_config(c);
  p.seed = RngSpec{seed, "bsgd"};
  return p;
}

Activation activation_from_config(const Config& c) {
  const std::string kind = c.get_or("activation", "kind", "shifted-sigmoid");
  try {
    if (kind == "shifted-sigmoid")
      return Activation::shifted_sigmoid(c.get_double_or("activation", "shift", 0.5));
    if (kind == "truncated-power")
      return Activation::truncated_power(static_cast<int>(c.get_int_or("activation", "L", 3)));
    if (kind == "polynomial")
      return Activation::polynomial(parse_double_list(c.get("activation", "m")));
    if (kind == "tanh") return Activation::tanh_act();
    if (kind == "perturbed") {
      const std::string base = c.get_or("activation", "base_kind", "shifted-sigmoid");
      Activation b = base == "tanh" ? Activation::tanh_act()
                                    : Activation::shifted_sigmoid(
                                          c.get_double_or("activation", "base_shift", 0.5));
      return Activation::perturbed(b, parse_double_list(c.get("activation", "rho")));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad [activation]: ") + e.what());
  }
  throw ConfigError("unknown activation kind: " + kind);
}

double max_abs_blocked(const EffectiveEnsemble& e, std::uint32_t blocked_mask) {
  double g = 0.0;
  for (const auto& p : e.pts)
    for (int i = 0; i < e.P; ++i)
      if ((blocked_mask >> i) & 1u) g = std::max(g, std::fabs(p.u[i]));
  return g;
}

double symmetry_gap(const EffectiveEnsemble& e, const std::vector<int>& perm) {
  double g = 0.0;
  for (const auto& p : e.pts)
    for (int i = 0; i < e.P; ++i) g = std::max(g, std::fabs(p.u[perm[i]] - p.u[i]));
  return g;
}

void symmetrize(EffectiveEnsemble& e, const std::vector<std::vector<int>>& perms) {
  std::vector<double> acc(e.P);
  const double inv = 1.0 / (1.0 + static_cast<double>(perms.size()));
  for (auto& p : e.pts) {
    for (int i = 0; i < e.P; ++i) acc[i] = p.u[i];
    for (const auto& perm : perms)
      for (int i = 0; i < e.P; ++i) acc[i] += p.u[perm[i]];
    for (int i = 0; i < e.P; ++i) p.u[i] = acc[i] * inv;
  }
}

double shared_measure_gap(const std::vector<std::vector<double>>& predictions,
                          const BsgdResult& sgd) {
  const std::size_t nrec =
      std::min(predictions.size(), static_cast<std::size_t>(sgd.trace.records()));
  const double inv_m = 1.0 / static_cast<double>(sgd.test_z.size());
  double g = 0.0;
  for (std::size_t r = 0; r < nrec; ++r)
    for (std::size_t j = 0; j < sgd.trace.tracked.size(); ++j) {
      double c = 0.0;
      for (std::uint32_t zm : sgd.test_z) c += chi_sign(sgd.trace.tracked[j], zm) * predictions[r][zm];
      g = std::max(g, std::fabs(c * inv_m - sgd.trace.coeff[r][j]));
    }
  return g;
}

ChunkedRun dfpde_chunked(const FourierFunction& h, EffectiveEnsemble e, const Schedules& sch,
                         const Activation& act, const DfpdeOptions& opt,
                         std::uint32_t blocked_mask,
                         const std::vector<std::vector<int>>& perms, double stuck_bound,
                         bool keep_snapshots) {
  ChunkedRun out;
  out.trace.tracked = opt.tracked.empty() ? h.support() : opt.tracked;
  out.max_sym_gap.assign(perms.size(), 0.0);
  out.min_risk_margin = std::numeric_limits<double>::infinity();

  const int nchunks = std::max(1, static_cast<int>(std::llround(opt.T / opt.record_dt)));
  DfpdeOptions chunk_opt = opt;
  chunk_opt.T = opt.record_dt;
  chunk_opt.tracked = out.trace.tracked;

  // re-project onto the fixed manifold between chunks, but only when the run
  // starts exactly on it (gaps are always measured before projecting)
  bool project = !perms.empty();
  for (const auto& perm : perms) project = project && symmetry_gap(e, perm) == 0.0;

  auto observe = [&](const EffectiveEnsemble& state) {
    out.max_blocked = std::max(out.max_blocked, max_abs_blocked(state, blocked_mask));
    for (std::size_t s = 0; s < perms.size(); ++s)
      out.max_sym_gap[s] = std::max(out.max_sym_gap[s], symmetry_gap(state, perms[s]));
    if (keep_snapshots) out.snapshots.push_back(state);
  };

  observe(e);
  double prev_risk = std::numeric_limits<double>::infinity();
  bool warned_increase = false;
  for (int chunk = 0; chunk < nchunks; ++chunk) {
    const double t0 = chunk * opt.record_dt;
    DfpdeResult step = dfpde_integrate(h, std::move(e), sch, act, chunk_opt);
    for (int i = 0; i < step.trace.records(); ++i) {
      if (chunk > 0 && i == 0) continue;  // same state as the previous chunk end
      const double tr = step.trace.risk[i];
      out.trace.add(t0 + step.trace.t[i], tr, step.trace.stderr_[i], step.trace.coeff[i]);
      out.min_risk_margin = std::min(out.min_risk_margin, tr - stuck_bound);
      if (sch.lambda_a == 0.0 && sch.lambda_w == 0.0 && tr > 1.1 * prev_risk &&
          !warned_increase) {
        out.trace.warnings.push_back("risk increased by more than 10% between records near t=" +
                                     format_double(t0 + step.trace.t[i]));
        warned_increase = true;
      }
      prev_risk = tr;
    }
    e = std::move(step.final);
    observe(e);
    if (project) symmetrize(e, perms);
    if (step.diverged) {
      out.diverged = true;
      out.trace.diverged = true;
      out.trace.warnings.push_back("diverged near t=" + format_double(t0 + opt.record_dt));
      break;
    }
  }
  out.final = std::move(e);
  return out;
}

RunResult run_experiment(const Config& c, const std::string& outdir) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string kind = c.get("", "kind");

  RunResult r;
  if (kind == "msp-check")
    r = run_msp_check(c, outdir);
  else if (kind == "train-dfpde")
    r = run_train_dfpde(c, outdir);
  else if (kind == "train-sgd")
    r = run_train_sgd(c, outdir);
  else if (kind == "fig1-compare")
    r = run_fig1_compare(c, outdir);
  else if (kind == "stuck-dynamics")
    r = run_stuck_dynamics(c, outdir);
  else if (kind == "two-phase-certify")
    r = run_two_phase(c, outdir);
  else if (kind == "recurrence-verify")
    r = run_recurrence_verify(c, outdir);
  else if (kind == "lower-bound-sweep")
    r = run_lower_bound_sweep(c, outdir);
  else if (kind == "symmetry-escape")
    r = run_symmetry_escape(c, outdir);
  else
    throw ConfigError("unknown experiment kind: " + kind);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Config manifest = c;
  manifest.set("manifest", "version", kVersion);
  manifest.set("manifest", "wall_s", format_double(wall));
  emit(r, outdir, "manifest.txt", config_format(manifest));
  return r;
}

}  // namespace msplab
