#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "core/activation.hpp"
#include "core/dynamics.hpp"
#include "core/fourier.hpp"
#include "core/quadrature.hpp"
#include "core/recurrence.hpp"

using namespace msplab;

TEST_CASE("first-order table entries are m1 alpha_i") {
  FourierFunction h =
      make_fourier(3, {{0b001, 0.7}, {0b010, -0.4}, {0b011, 1.1}, {0b111, 0.9}});
  std::vector<double> m = {0.3, 0.8, -0.2, 0.5, 0.1};
  CoeffTable tab = continuous_coeff_table(h, m, 4);
  CHECK(tab.at(1, 1) == doctest::Approx(0.8 * 0.7).epsilon(1e-14));
  CHECK(tab.at(2, 1) == doctest::Approx(0.8 * -0.4).epsilon(1e-14));
  CHECK(tab.at(3, 1) == doctest::Approx(0.0));
}

TEST_CASE("second-order entry on the depth-2 staircase") {
  std::vector<double> m = {0.3, 0.8, -0.2, 0.5, 0.1};
  FourierFunction v2 = make_fourier(2, {{0b01, 0.9}, {0b11, 1.3}});
  CoeffTable t2 = continuous_coeff_table(v2, m, 3);
  // p_{2,2} = m1 m2 alpha_1 alpha_12 / 2
  CHECK(t2.at(2, 2) == doctest::Approx(0.5 * 0.8 * -0.2 * 0.9 * 1.3).epsilon(1e-13));
}

TEST_CASE("parity target has a vanishing table") {
  std::vector<double> m = {0.3, 0.8, -0.2, 0.5, 0.1};
  CoeffTable t = continuous_coeff_table(make_fourier(3, {{0b111, 1.0}}), m, 4);
  for (int i = 1; i <= 3; ++i)
    for (int l = 1; l <= 4; ++l) CHECK(std::fabs(t.at(i, l)) <= 1e-14);
}

TEST_CASE("linear activation stops at first order") {
  CoeffTable lin = continuous_coeff_table(make_fourier(1, {{0b1, 1.0}}),
                                          {0.0, 1.0, 0.0, 0.0, 0.0}, 4);
  CHECK(lin.at(1, 1) == doctest::Approx(1.0));
  for (int l = 2; l <= 4; ++l) CHECK(std::fabs(lin.at(1, l)) <= 1e-14);
}

TEST_CASE("cubic self-interaction enters at third order") {
  std::vector<double> m = {0.3, 0.8, -0.2, 0.5, 0.1};
  const double al = 1.4;
  CoeffTable cub = continuous_coeff_table(make_fourier(1, {{0b1, al}}), m, 4);
  CHECK(cub.at(1, 3) ==
        doctest::Approx(al * al * al * m[3] * m[1] * m[1] / 6.0).epsilon(1e-12));
}

TEST_CASE("order exponents follow the introduction tree") {
  OrderExponents v = order_exponents({3, {0b001, 0b011, 0b111}});
  CHECK(v.o == std::vector<int>{1, 2, 4});
  OrderExponents w = order_exponents({3, {0b001, 0b010, 0b111}});
  CHECK(w.o == std::vector<int>{1, 1, 3});
}

TEST_CASE("closed-form leading order at small k") {
  std::vector<double> m = {0.2, 0.9, -0.4, 0.3};
  const double a = 0.8, t = 0.05;
  CHECK(vanilla_leading_order({1.2}, m, 1, a, t) ==
        doctest::Approx(m[1] * 1.2 * a * t).epsilon(1e-13));
  CHECK(vanilla_leading_order({1.2, 0.7}, m, 2, a, t) ==
        doctest::Approx(0.5 * std::pow(a * t, 2) * (m[1] * 1.2) * (m[2] * 0.7))
            .epsilon(1e-13));
}

TEST_CASE("simplified flow is exact for a linear activation") {
  // du/dt = a alpha with sigma(x) = x, so u(t) = a alpha t
  Activation lin = Activation::polynomial({0.0, 1.0});
  FourierFunction h = make_fourier(1, {{0b1, 0.75}});
  std::vector<double> u = simplified_integrate(h, lin, 0.6, 1.0, 1e-4);
  REQUIRE(u.size() == 1);
  CHECK(u[0] == doctest::Approx(0.6 * 0.75).epsilon(1e-10));
}

TEST_CASE("taylor table predicts the simplified flow at small times") {
  FourierFunction h = make_fourier(2, {{0b01, 1.0}, {0b11, 0.8}});
  Activation act = Activation::polynomial({0.1, 1.0, 0.5, -0.2, 0.05});
  const int L = 4;
  CoeffTable tab = continuous_coeff_table(h, act.taylor_upto(L + 1), L);
  const double a = 0.8;
  auto integrate2 = [&](double t) {
    // one Richardson step so the Euler error sits well below the remainder
    std::vector<double> u1 = simplified_integrate(h, act, a, t, t / 4000.0);
    std::vector<double> u2 = simplified_integrate(h, act, a, t, t / 8000.0);
    for (std::size_t i = 0; i < u1.size(); ++i) u2[i] = 2.0 * u2[i] - u1[i];
    return u2;
  };
  auto remainder = [&](double t) {
    std::vector<double> u = integrate2(t);
    double worst = 0.0;
    for (int i = 1; i <= 2; ++i) {
      double pred = 0.0;
      for (int l = 1; l <= L; ++l) pred += std::pow(a * t, l) * tab.at(i, l);
      worst = std::max(worst, std::fabs(u[i - 1] - pred));
    }
    return worst;
  };
  const double e1 = remainder(0.05);
  const double e2 = remainder(0.025);
  CHECK(e1 < 1e-5);
  // halving t should shrink the remainder by roughly 2^{L+1}
  CHECK(e2 < e1 / 12.0 + 1e-13);
}

TEST_CASE("discrete table reproduces the discrete integrator") {
  FourierFunction h = make_fourier(2, {{0b01, 0.9}, {0b10, -0.5}, {0b11, 0.7}});
  Activation act = Activation::polynomial({0.2, 1.1, -0.3, 0.4, 0.1});
  const double eta = 0.05;
  const int k1 = 4;
  const int M = 1 << 2;
  EffectiveEnsemble e = make_ensemble(2, legendre_rule(16), 0.0);
  QuadratureRule herm = hermite_rule(21);
  std::vector<std::vector<double>> xi;
  for (int k = 0; k < k1; ++k) {
    std::vector<double> fv = effective_predict_all(e, act, herm);
    std::vector<double> res(M);
    for (int z = 0; z < M; ++z) res[z] = h.eval_mask(z) - fv[z];
    FourierFunction rf = walsh_transform(2, res);
    std::vector<double> row(M, 0.0);
    for (int s = 0; s < M; ++s) row[s] = rf.alpha(s);
    xi.push_back(std::move(row));
    dfpde_step_discrete(e, h, act, herm, 0.0, eta, 0.0, 0.0);
  }
  const std::vector<double> rho = act.taylor_upto(6);
  for (int j : {0, 8, 15}) {
    auto table = discrete_coeff_eval(2, xi, rho, eta * e.pts[j].a, k1);
    REQUIRE(table.size() == static_cast<std::size_t>(k1) + 1);
    for (int i = 1; i <= 2; ++i)
      CHECK(std::fabs(table[k1][i - 1] - e.pts[j].u[i - 1]) <= 1e-9);
  }
}

TEST_CASE("coeff table csv lists every (i, l) cell") {
  CoeffTable tab = continuous_coeff_table(
      make_fourier(2, {{0b01, 1.0}, {0b11, 1.0}}), {0.0, 1.0, 0.5}, 2);
  std::string csv = coeff_table_csv(tab);
  CHECK(csv.rfind("i,l,value\n", 0) == 0);
  int rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 1 + tab.P * tab.L);
}

TEST_CASE("order exponents reject non-minimal structures") {
  CHECK_THROWS_AS(order_exponents({3, {0b001, 0b011}}), std::invalid_argument);
  // three sets but {1,2} introduces nothing fresh and coordinate 3 is never covered
  CHECK_THROWS_AS(order_exponents({3, {0b001, 0b010, 0b011}}), std::invalid_argument);
}
