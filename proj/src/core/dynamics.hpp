#pragma once
// Training dynamics: minibatch SGD on the ambient network and the
// dimension-free effective dynamics on (a, u, s) particles.
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/activation.hpp"
#include "core/fourier.hpp"
#include "core/quadrature.hpp"
#include "core/rng.hpp"
#include "core/trace.hpp"

namespace msplab {

struct Particle {
  double a = 0.0;
  std::vector<double> u;  // size P
  double s = 0.0;         // >= 0
};

struct EffectiveEnsemble {
  int P = 0;
  std::vector<double> w;        // node weights, sum 1
  std::vector<Particle> pts;

  int size() const { return static_cast<int>(pts.size()); }
};

// particles at Legendre nodes for a ~ Unif[-1,1], u = 0, s = s0
EffectiveEnsemble make_ensemble(int P, const QuadratureRule& a_rule, double s0);

struct Schedules {
  std::function<double(double)> xi_a = [](double) { return 1.0; };
  std::function<double(double)> xi_w = [](double) { return 1.0; };
  double lambda_a = 0.0;
  double lambda_w = 0.0;
};

// f_hat on every hypercube point; E_G via hermite (single node when s == 0)
std::vector<double> effective_predict_all(const EffectiveEnsemble& e, const Activation& act,
                                          const QuadratureRule& hermite);
double effective_predict(const EffectiveEnsemble& e, const Activation& act,
                         const QuadratureRule& hermite, std::uint32_t z_mask);
double effective_risk(const EffectiveEnsemble& e, const FourierFunction& h,
                      const Activation& act, const QuadratureRule& hermite);

struct DfpdeOptions {
  double T = 10.0;
  double delta = 0.01;       // Euler step
  double record_dt = 0.1;
  int hermite_nodes = 21;
  std::vector<std::uint32_t> tracked;  // defaults to support of h
};

struct DfpdeResult {
  TrainingTrace trace;
  EffectiveEnsemble final;
  bool diverged = false;
};

DfpdeResult dfpde_integrate(const FourierFunction& h, EffectiveEnsemble e,
                            const Schedules& sch, const Activation& act,
                            const DfpdeOptions& opt);

// one simultaneous discrete step from the time-k state
void dfpde_step_discrete(EffectiveEnsemble& e, const FourierFunction& h, const Activation& act,
                         const QuadratureRule& hermite, double eta_a, double eta_w,
                         double lambda_a, double lambda_w);

// drift at the current state (column layout: [a, u_1..u_P, s] per particle);
// matches -H grad psi for the frozen-ensemble potential, H = diag(xi_a, xi_w I)
void dfpde_drift(const EffectiveEnsemble& e, const FourierFunction& h, const Activation& act,
                 const QuadratureRule& hermite, double xi_a, double xi_w, double lambda_a,
                 double lambda_w, std::vector<double>& out);

// potential with the interaction field frozen at ensemble `frozen`, evaluated for
// particle j of `e` displaced to (a,u,s) given in theta
double dfpde_potential(const EffectiveEnsemble& frozen, const Activation& act,
                       const QuadratureRule& hermite, const FourierFunction& h, int j,
                       const std::vector<double>& theta, double lambda_a, double lambda_w);

struct BsgdParams {
  int d = 100;
  int N = 100;
  int b = 150;
  double eta = 0.5;
  int steps = 100;
  int record_every = 1;
  int test_m = 300;
  double noise_std = 0.0;
  bool w_init_gauss = true;  // false: w0 = 0
  Schedules sch;
  RngSpec seed;  // streams derived: init / data / test-set
  std::vector<std::uint32_t> tracked;
};

struct BsgdResult {
  TrainingTrace trace;
  std::vector<double> a;              // final second layer
  std::vector<std::vector<double>> w; // final first layer, N rows of d
  std::vector<std::uint32_t> test_z;  // latent masks of the held-out test set
  bool diverged = false;
};

// latent coordinates are the first P of d
BsgdResult bsgd_train(const FourierFunction& h, const Activation& act, const BsgdParams& p);

}  // namespace msplab
