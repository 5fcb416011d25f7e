#include "core/twophase.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "core/bits.hpp"
#include "core/recurrence.hpp"

namespace msplab {

namespace {

// sigma(<u_j, z>) for every node and hypercube point, row-major nodes x 2^P
std::vector<double> node_values(const FirstLayerMap& map, const Activation& act) {
  const int M = 1 << map.P;
  std::vector<double> sig(static_cast<std::size_t>(map.nodes()) * M);
  for (int j = 0; j < map.nodes(); ++j) {
    const double* u = &map.U[static_cast<std::size_t>(j) * map.P];
    for (int m = 0; m < M; ++m) {
      double inner = 0.0;
      for (int i = 0; i < map.P; ++i) inner += ((m >> i) & 1) ? u[i] : -u[i];
      sig[static_cast<std::size_t>(j) * M + m] = act.value(inner);
    }
  }
  return sig;
}

std::vector<double> initial_residual(const FirstLayerMap& map, const FourierFunction& h,
                                     const std::vector<double>& sig) {
  const int M = 1 << map.P;
  const std::vector<double> hv = h.values_on_hypercube();
  std::vector<double> g(M, 0.0);
  for (int j = 0; j < map.nodes(); ++j) {
    const double wa = map.weight[j] * map.a0[j];
    for (int m = 0; m < M; ++m) g[m] += wa * sig[static_cast<std::size_t>(j) * M + m];
  }
  for (int m = 0; m < M; ++m) g[m] -= hv[m];
  return g;
}

constexpr double kCertifyFloor = 1e-10;

}  // namespace

FirstLayerMap phase1(const FourierFunction& h, const Activation& act, double T1,
                     const QuadratureRule& a_rule, double delta, Phase1Variant variant) {
  if (T1 < 0.0) throw std::invalid_argument("phase1: T1 must be >= 0");
  if (delta <= 0.0) throw std::invalid_argument("phase1: delta must be > 0");
  FirstLayerMap map;
  map.P = h.P;
  map.T1 = T1;
  map.a0 = a_rule.x;
  map.weight = a_rule.w;
  map.activation = act.describe();
  map.U.assign(a_rule.x.size() * static_cast<std::size_t>(h.P), 0.0);

  if (variant == Phase1Variant::Full) {
    map.source = "continuous";
    EffectiveEnsemble e = make_ensemble(h.P, a_rule, 0.0);
    Schedules sch;
    sch.xi_a = [](double) { return 0.0; };
    sch.xi_w = [](double) { return 1.0; };
    DfpdeOptions opt;
    opt.T = T1;
    opt.delta = delta;
    opt.record_dt = T1 > 0.0 ? T1 : 1.0;
    DfpdeResult res = dfpde_integrate(h, std::move(e), sch, act, opt);
    for (int j = 0; j < res.final.size(); ++j)
      for (int i = 0; i < h.P; ++i)
        map.U[static_cast<std::size_t>(j) * h.P + i] = res.final.pts[j].u[i];
    return map;
  }

  map.source = "simplified";
  for (std::size_t j = 0; j < a_rule.x.size(); ++j) {
    const std::vector<double> u = simplified_integrate(h, act, a_rule.x[j], T1, delta);
    for (int i = 0; i < h.P; ++i) map.U[j * h.P + i] = u[i];
  }
  return map;
}

KernelMatrix kernel_matrix(const FirstLayerMap& map, const Activation& act) {
  const int M = 1 << map.P;
  const std::vector<double> sig = node_values(map, act);
  KernelMatrix km;
  km.P = map.P;
  km.K.assign(static_cast<std::size_t>(M) * M, 0.0);
  for (int j = 0; j < map.nodes(); ++j) {
    const double wj = map.weight[j];
    const double* row = &sig[static_cast<std::size_t>(j) * M];
    for (int z = 0; z < M; ++z) {
      const double wz = wj * row[z];
      for (int zp = z; zp < M; ++zp) km.K[static_cast<std::size_t>(z) * M + zp] += wz * row[zp];
    }
  }
  for (int z = 0; z < M; ++z)
    for (int zp = 0; zp < z; ++zp)
      km.K[static_cast<std::size_t>(z) * M + zp] = km.K[static_cast<std::size_t>(zp) * M + z];
  return km;
}

double lambda_min_matrix(const std::vector<double>& A, int n) {
  return jacobi_eigen(A, n).values.front();
}

double lambda_min(const KernelMatrix& K) {
  return lambda_min_matrix(K.K, 1 << K.P);
}

KernelSpectrum kernel_operator_spectrum(const FirstLayerMap& map, const Activation& act) {
  const int M = 1 << map.P;
  const int n = map.nodes();
  const std::vector<double> sig = node_values(map, act);
  KernelSpectrum ks;
  ks.phi.assign(static_cast<std::size_t>(n) * M, 0.0);
  std::vector<double> B(static_cast<std::size_t>(n) * M, 0.0);
  for (int j = 0; j < n; ++j) {
    const double* row = &sig[static_cast<std::size_t>(j) * M];
    const double sw = std::sqrt(map.weight[j]);
    for (int S = 0; S < M; ++S) {
      double acc = 0.0;
      for (int m = 0; m < M; ++m) acc += chi_sign(static_cast<std::uint32_t>(S), m) * row[m];
      const double phi = acc / M;
      ks.phi[static_cast<std::size_t>(j) * M + S] = phi;
      B[static_cast<std::size_t>(j) * M + S] = sw * phi;
    }
  }
  const SvdResult svd = one_sided_jacobi_svd(B, n, M);
  ks.eigenvalues.resize(M);
  for (int i = 0; i < M; ++i) ks.eigenvalues[i] = svd.singular[i] * svd.singular[i];
  return ks;
}

Phase2Result phase2(const KernelMatrix& K, const FourierFunction& h,
                    const FirstLayerMap& map, const Activation& act, double T2,
                    double record_dt, Phase2Mode mode, double euler_delta) {
  if (K.P != h.P || map.P != h.P) throw std::invalid_argument("phase2: dimension mismatch");
  if (T2 < map.T1) throw std::invalid_argument("phase2: T2 must be >= T1");
  if (record_dt <= 0.0) throw std::invalid_argument("phase2: record_dt must be > 0");
  const int M = 1 << h.P;
  if (!is_symmetric(K.K, M)) throw std::invalid_argument("phase2: kernel not symmetric");

  const std::vector<double> sig = node_values(map, act);
  std::vector<double> g = initial_residual(map, h, sig);

  Phase2Result res;
  const std::vector<std::uint32_t> tracked = h.support();
  res.trace.tracked = tracked;

  auto record = [&](double t, const std::vector<double>& gz) {
    double risk = 0.0;
    for (int m = 0; m < M; ++m) risk += gz[m] * gz[m];
    risk /= M;
    std::vector<double> coeff(tracked.size(), 0.0);
    for (std::size_t c = 0; c < tracked.size(); ++c) {
      double acc = 0.0;
      for (int m = 0; m < M; ++m) acc += chi_sign(tracked[c], m) * gz[m];
      coeff[c] = h.alpha(tracked[c]) + acc / M;  // predictor = h + g
    }
    res.trace.add(t, risk, 0.0, std::move(coeff));
  };

  const double span = T2 - map.T1;
  if (mode == Phase2Mode::Exact) {
    // eigenbasis of the operator via the factor SVD; g evolves mode-wise
    const KernelSpectrum ks = kernel_operator_spectrum(map, act);
    res.lambda_min = ks.eigenvalues.front();
    // Fourier residual and its eigen-coordinates
    std::vector<double> ghat(M, 0.0);
    for (int S = 0; S < M; ++S) {
      double acc = 0.0;
      for (int m = 0; m < M; ++m) acc += chi_sign(static_cast<std::uint32_t>(S), m) * g[m];
      ghat[S] = acc / M;
    }
    // rebuild the operator in the Fourier basis and diagonalize it exactly once
    // (the factor SVD supplies eigenvalues; eigenvectors come from Jacobi on B^T B)
    std::vector<double> A(static_cast<std::size_t>(M) * M, 0.0);
    for (int j = 0; j < map.nodes(); ++j) {
      const double wj = map.weight[j];
      const double* pj = &ks.phi[static_cast<std::size_t>(j) * M];
      for (int S = 0; S < M; ++S)
        for (int Sp = S; Sp < M; ++Sp)
          A[static_cast<std::size_t>(S) * M + Sp] += wj * pj[S] * pj[Sp];
    }
    for (int S = 0; S < M; ++S)
      for (int Sp = 0; Sp < S; ++Sp)
        A[static_cast<std::size_t>(S) * M + Sp] = A[static_cast<std::size_t>(Sp) * M + S];
    const EigenResult eig = jacobi_eigen(A, M);
    std::vector<double> gamma(M, 0.0);
    for (int i = 0; i < M; ++i) {
      double acc = 0.0;
      for (int S = 0; S < M; ++S) acc += eig.vectors[S + M * i] * ghat[S];
      gamma[i] = acc;
    }
    for (int i = 0; i < M; ++i)
      if (ks.eigenvalues[i] <= kCertifyFloor) res.plateau += gamma[i] * gamma[i];
    res.degenerate = res.plateau > 1e-15;

    const long long nrec =
        span > 0.0 ? std::max<long long>(1, std::llround(span / record_dt)) : 0;
    std::vector<double> gz(M);
    for (long long k = 0; k <= nrec; ++k) {
      const double dt = nrec > 0 ? span * static_cast<double>(k) / static_cast<double>(nrec) : 0.0;
      std::vector<double> gh(M, 0.0);
      for (int i = 0; i < M; ++i) {
        // pair Jacobi eigenvectors with the high-accuracy factor eigenvalues
        const double decay = std::exp(-ks.eigenvalues[i] * dt);
        const double gi = gamma[i] * decay;
        for (int S = 0; S < M; ++S) gh[S] += eig.vectors[S + M * i] * gi;
      }
      for (int m = 0; m < M; ++m) {
        double acc = 0.0;
        for (int S = 0; S < M; ++S) acc += chi_sign(static_cast<std::uint32_t>(S), m) * gh[S];
        gz[m] = acc;
      }
      record(map.T1 + dt, gz);
      if (k == nrec) res.g_final = gz;
    }
    return res;
  }

  // Euler / discrete stepping on the z-indexed residual
  res.lambda_min = kernel_operator_spectrum(map, act).eigenvalues.front();
  const double step = euler_delta;
  const long long nsteps = std::llround(span / step);
  const long long rec_stride = std::max<long long>(1, std::llround(record_dt / step));
  std::vector<double> kg(M);
  for (long long k = 0; k <= nsteps; ++k) {
    if (k % rec_stride == 0 || k == nsteps) record(map.T1 + k * step, g);
    if (k == nsteps) break;
    for (int z = 0; z < M; ++z) {
      double acc = 0.0;
      const double* row = &K.K[static_cast<std::size_t>(z) * M];
      for (int zp = 0; zp < M; ++zp) acc += row[zp] * g[zp];
      kg[z] = acc / M;
    }
    for (int z = 0; z < M; ++z) g[z] -= step * kg[z];
  }
  res.g_final = g;
  return res;
}

std::uint64_t beta_signature(std::uint32_t set_mask) {
  // beta(S) = sum_{k in S} 2^{k-1}: with bit k-1 standing for coordinate k this
  // is the mask read as an integer
  return set_mask;
}

std::vector<double> gram_monomial_matrix(int P) {
  if (P < 0 || P > 8) throw std::invalid_argument("gram_monomial_matrix: P out of range");
  const int M = 1 << P;
  std::vector<double> out(static_cast<std::size_t>(M) * M, 0.0);
  for (int S = 0; S < M; ++S)
    for (int Sp = 0; Sp < M; ++Sp) {
      const std::uint64_t deg = beta_signature(S) + beta_signature(Sp);
      out[static_cast<std::size_t>(S) * M + Sp] =
          (deg % 2 == 0) ? 1.0 / static_cast<double>(deg + 1) : 0.0;
    }
  return out;
}

CertifyReport two_phase_certify(const FourierFunction& h, const Activation& act, double T1,
                                const QuadratureRule& a_rule, double delta,
                                double target_risk) {
  if (target_risk <= 0.0) throw std::invalid_argument("two_phase_certify: target risk");
  CertifyReport rep;
  rep.T1 = T1;
  rep.activation = act.describe();

  const FirstLayerMap map = phase1(h, act, T1, a_rule, delta, Phase1Variant::Full);
  const KernelSpectrum ks = kernel_operator_spectrum(map, act);
  rep.lambda_min = ks.eigenvalues.front();
  rep.certified = rep.lambda_min > kCertifyFloor;

  const std::vector<double> sig = node_values(map, act);
  std::vector<double> g = initial_residual(map, h, sig);
  const int M = 1 << h.P;
  double r1 = 0.0;
  for (int m = 0; m < M; ++m) r1 += g[m] * g[m];
  rep.risk_t1 = r1 / M;

  double span = 0.0;
  if (rep.risk_t1 > target_risk && rep.lambda_min > 0.0)
    span = std::log(rep.risk_t1 / target_risk) / rep.lambda_min;
  rep.T2 = T1 + span;

  // eigenmode expansion of the residual gives the exact phase-2 risk at T2
  std::vector<double> ghat(M, 0.0);
  for (int S = 0; S < M; ++S) {
    double acc = 0.0;
    for (int m = 0; m < M; ++m) acc += chi_sign(static_cast<std::uint32_t>(S), m) * g[m];
    ghat[S] = acc / M;
  }
  std::vector<double> A(static_cast<std::size_t>(M) * M, 0.0);
  for (int j = 0; j < map.nodes(); ++j) {
    const double wj = map.weight[j];
    const double* pj = &ks.phi[static_cast<std::size_t>(j) * M];
    for (int S = 0; S < M; ++S)
      for (int Sp = S; Sp < M; ++Sp)
        A[static_cast<std::size_t>(S) * M + Sp] += wj * pj[S] * pj[Sp];
  }
  for (int S = 0; S < M; ++S)
    for (int Sp = 0; Sp < S; ++Sp)
      A[static_cast<std::size_t>(S) * M + Sp] = A[static_cast<std::size_t>(Sp) * M + S];
  const EigenResult eig = jacobi_eigen(A, M);
  double risk2 = 0.0;
  for (int i = 0; i < M; ++i) {
    double gamma = 0.0;
    for (int S = 0; S < M; ++S) gamma += eig.vectors[S + M * i] * ghat[S];
    risk2 += gamma * gamma * std::exp(-2.0 * ks.eigenvalues[i] * span);
  }
  rep.predicted_risk = risk2;
  rep.risk_t2 = risk2;
  return rep;
}

std::string kernel_csv(const KernelMatrix& K) {
  const int M = 1 << K.P;
  std::ostringstream os;
  os << "z";
  for (int z = 0; z < M; ++z) {
    os << ",";
    for (int i = 0; i < K.P; ++i) os << (((z >> i) & 1) ? '+' : '-');
  }
  os << "\n";
  for (int z = 0; z < M; ++z) {
    for (int i = 0; i < K.P; ++i) os << (((z >> i) & 1) ? '+' : '-');
    for (int zp = 0; zp < M; ++zp)
      os << "," << format_double(K.K[static_cast<std::size_t>(z) * M + zp]);
    os << "\n";
  }
  return os.str();
}

std::string gram_csv(int P, const std::vector<double>& M_) {
  const int M = 1 << P;
  std::ostringstream os;
  os << "S";
  for (int S = 0; S < M; ++S) os << "," << set_column_label(S);
  os << "\n";
  for (int S = 0; S < M; ++S) {
    os << set_column_label(S);
    for (int Sp = 0; Sp < M; ++Sp)
      os << "," << format_double(M_[static_cast<std::size_t>(S) * M + Sp]);
    os << "\n";
  }
  return os.str();
}

std::string certify_report_text(const CertifyReport& r) {
  return meta_text({{"T1", format_double(r.T1)},
                    {"T2", format_double(r.T2)},
                    {"lambda_min", format_double(r.lambda_min)},
                    {"risk_T1", format_double(r.risk_t1)},
                    {"risk_T2", format_double(r.risk_t2)},
                    {"predicted_risk", format_double(r.predicted_risk)},
                    {"activation", r.activation},
                    {"certified", r.certified ? "pass" : "fail"}});
}

}  // namespace msplab
