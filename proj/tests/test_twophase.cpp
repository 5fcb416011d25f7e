#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "core/activation.hpp"
#include "core/fourier.hpp"
#include "core/quadrature.hpp"
#include "core/twophase.hpp"

using namespace msplab;

TEST_CASE("beta signatures of the monomial degrees") {
  CHECK(beta_signature(0b0) == 0);
  CHECK(beta_signature(0b001) == 1);
  CHECK(beta_signature(0b011) == 3);
  CHECK(beta_signature(0b110) == 6);
  CHECK(beta_signature(0b111) == 7);
  CHECK(beta_signature(0b1000) == 8);
}

TEST_CASE("monomial gram matrix matches the uniform moments") {
  // G[S,S'] = E[a^(beta(S)+beta(S'))] = 1/(b+b'+1) for even sums, 0 otherwise
  std::vector<double> G = gram_monomial_matrix(2);
  REQUIRE(G.size() == 16);
  auto at = [&](int i, int j) { return G[i * 4 + j]; };
  CHECK(at(0, 0) == doctest::Approx(1.0));
  CHECK(at(0, 1) == doctest::Approx(0.0));
  CHECK(at(0, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(at(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(at(1, 2) == doctest::Approx(0.0));
  CHECK(at(1, 3) == doctest::Approx(1.0 / 5.0));
  CHECK(at(2, 2) == doctest::Approx(1.0 / 5.0));
  CHECK(at(3, 3) == doctest::Approx(1.0 / 7.0));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) CHECK(at(i, j) == at(j, i));
}

TEST_CASE("lambda_min on explicit matrices") {
  CHECK(lambda_min_matrix({1, 0, 0, 0, 1, 0, 0, 0, 1}, 3) == doctest::Approx(1.0));
  CHECK(lambda_min_matrix({2, 1, 1, 2}, 2) == doctest::Approx(1.0));
  CHECK(lambda_min_matrix({0, 0, 0, 0}, 2) == doctest::Approx(0.0));
}

TEST_CASE("frozen map with zero first layer gives a constant kernel") {
  FirstLayerMap map;
  map.P = 2;
  map.T1 = 0.0;
  QuadratureRule gl = legendre_rule(16);
  map.a0 = gl.x;
  map.weight = gl.w;
  map.U.assign(static_cast<std::size_t>(map.nodes()) * map.P, 0.0);
  map.activation = "test";
  map.source = "simplified";
  Activation act = Activation::shifted_sigmoid(0.5);
  const double s0 = act.value(0.0);

  KernelMatrix K = kernel_matrix(map, act);
  REQUIRE(K.K.size() == 16);
  for (double v : K.K) CHECK(v == doctest::Approx(s0 * s0).epsilon(1e-13));
  CHECK(lambda_min(K) >= -1e-12);

  // as an operator the constant kernel has one nonzero mode
  KernelSpectrum ks = kernel_operator_spectrum(map, act);
  REQUIRE(ks.eigenvalues.size() == 4);
  CHECK(ks.eigenvalues.back() == doctest::Approx(s0 * s0).epsilon(1e-12));
  for (std::size_t i = 0; i + 1 < ks.eigenvalues.size(); ++i)
    CHECK(std::fabs(ks.eigenvalues[i]) <= 1e-14);
}

TEST_CASE("phase1 integrates away from the origin") {
  FourierFunction h = make_fourier(2, {{0b01, 1.0}, {0b11, 1.0}});
  Activation act = Activation::shifted_sigmoid(0.5);
  FirstLayerMap map = phase1(h, act, 0.2, legendre_rule(24), 1e-4, Phase1Variant::Full);
  CHECK(map.P == 2);
  CHECK(map.T1 == doctest::Approx(0.2));
  REQUIRE(map.nodes() == 24);
  double moved = 0.0;
  for (double u : map.U) moved = std::max(moved, std::fabs(u));
  CHECK(moved > 1e-4);
  CHECK(map.source == "continuous");
}

TEST_CASE("phase2 contracts the residual and both modes agree") {
  FourierFunction h = make_fourier(2, {{0b01, 1.0}, {0b11, 1.0}});
  Activation act = Activation::shifted_sigmoid(0.5);
  FirstLayerMap map = phase1(h, act, 0.3, legendre_rule(48), 1e-4, Phase1Variant::Full);
  KernelMatrix K = kernel_matrix(map, act);
  const double T2 = map.T1 + 5.0;
  Phase2Result ex = phase2(K, h, map, act, T2, 1.0, Phase2Mode::Exact);
  Phase2Result eu = phase2(K, h, map, act, T2, 1.0, Phase2Mode::Euler, 1e-3);
  CHECK(ex.trace.risk.front() == doctest::Approx(eu.trace.risk.front()).epsilon(1e-12));
  CHECK(ex.trace.risk.back() <= ex.trace.risk.front());
  CHECK(std::fabs(ex.trace.risk.back() - eu.trace.risk.back()) <=
        1e-3 * std::max(1e-9, ex.trace.risk.back()) + 1e-9);
  REQUIRE(ex.g_final.size() == 4);
}

TEST_CASE("phase2 with a zero time span stays finite") {
  FourierFunction h = make_fourier(2, {{0b01, 1.0}, {0b11, 1.0}});
  Activation act = Activation::shifted_sigmoid(0.5);
  FirstLayerMap map = phase1(h, act, 0.1, legendre_rule(16), 1e-3, Phase1Variant::Full);
  KernelMatrix K = kernel_matrix(map, act);
  Phase2Result r = phase2(K, h, map, act, map.T1, 1.0, Phase2Mode::Exact);
  REQUIRE(r.trace.records() >= 1);
  CHECK(std::isfinite(r.trace.risk.front()));
  CHECK(r.trace.risk.front() == doctest::Approx(r.trace.risk.back()));
}

TEST_CASE("certification meets its own risk prediction") {
  Activation act = Activation::shifted_sigmoid(0.5);
  QuadratureRule gl = legendre_rule(64);
  FourierFunction h = make_fourier(2, {{0b01, 1.0}, {0b11, 1.0}});
  CertifyReport rep = two_phase_certify(h, act, 0.1, gl, 5e-4, 1e-3);
  CHECK(rep.T1 == doctest::Approx(0.1));
  CHECK(rep.T2 > rep.T1);
  CHECK(rep.lambda_min > 0.0);
  CHECK(rep.risk_t1 > rep.risk_t2);
  CHECK(rep.risk_t2 <= 1e-3 + 1e-12);
  CHECK(rep.risk_t2 <= 2.0 * rep.predicted_risk);
  CHECK(rep.predicted_risk <= 2.0 * rep.risk_t2);
  // the certified flag is exactly the eigenvalue-floor predicate
  CHECK(rep.certified == (rep.lambda_min > 1e-10));
  CHECK(!certify_report_text(rep).empty());
}

TEST_CASE("kernel eigenvalue floor scales with the gram signature") {
  // lambda_min ~ T1^(2 beta) for the depth-2 staircase, beta({1,2}) = 3
  Activation act = Activation::shifted_sigmoid(0.5);
  QuadratureRule gl = legendre_rule(64);
  FourierFunction h = make_fourier(2, {{0b01, 1.0}, {0b11, 1.0}});
  std::vector<double> ladder = {0.05, 0.1};
  std::vector<double> lam;
  for (double T1 : ladder) {
    CertifyReport rep = two_phase_certify(h, act, T1, gl, T1 / 200.0, 1e-3);
    REQUIRE(rep.lambda_min > 0.0);
    lam.push_back(rep.lambda_min);
  }
  const double slope = std::log(lam[1] / lam[0]) / std::log(ladder[1] / ladder[0]);
  CHECK(slope > 5.0);
  CHECK(slope < 7.0);
}
