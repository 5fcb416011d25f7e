#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "core/bounds.hpp"
#include "core/fourier.hpp"
#include "core/rng.hpp"

using namespace msplab;

TEST_CASE("binomial coefficients are exact") {
  CHECK(binom(10, 3) == 120.0);
  CHECK(binom(7, 0) == 1.0);
  CHECK(binom(5, 5) == 1.0);
  CHECK(binom(4, 7) == 0.0);
  CHECK(binom(-1, 0) == 0.0);
  CHECK(binom(52, 26) == 495918532948104.0);  // still below 2^53, must be exact
}

TEST_CASE("closed-form sample bounds") {
  BoundReport pk = polyk_bound(4, 2, 1, 1.0);
  CHECK(pk.value == 6.0);
  CHECK(!pk.degenerate);
  BoundReport st = staircase_bound(10, 4, 1.0);
  CHECK(st.value == 22.5);
  CHECK_THROWS_AS(polyk_bound(2, 3, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(polyk_bound(4, 2, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(polyk_bound(4, 2, 1, 1.5), std::invalid_argument);
}

TEST_CASE("dimension bound in operator-norm mode") {
  GramMatrix id;
  id.M = 4;
  id.G.assign(16, 0.0);
  for (int i = 0; i < 4; ++i) id.G[i * 4 + i] = 1.0;
  BoundReport r = dimension_lower_bound(id, 0.1, 0.0, BoundMode::OpNorm);
  CHECK(r.value == doctest::Approx(3.6).epsilon(1e-12));

  GramMatrix pair;
  pair.M = 2;
  pair.G = {1.0, 0.5, 0.5, 1.0};  // eigenvalues 0.5 and 1.5
  BoundReport r2 = dimension_lower_bound(pair, 0.1, 0.0, BoundMode::OpNorm);
  CHECK(r2.value == doctest::Approx(2.0 * 0.9 / 1.5).epsilon(1e-12));
}

TEST_CASE("dimension bound in row-sum mode") {
  GramMatrix id;
  id.M = 4;
  id.G.assign(16, 0.0);
  for (int i = 0; i < 4; ++i) id.G[i * 4 + i] = 1.0;
  BoundReport r = dimension_lower_bound(id, 0.5, 0.1, BoundMode::RowSum);
  // max_i mean_j |G_ij| = 1/4
  CHECK(r.value == doctest::Approx((0.5 - 0.1) * 4.0).epsilon(1e-12));
  BoundReport deg = dimension_lower_bound(id, 0.1, 0.1, BoundMode::RowSum);
  CHECK(deg.degenerate);
  CHECK(deg.value == 0.0);
}

TEST_CASE("permuted-class gram averages match the combinatorial values") {
  // normalized depth-3 staircase: P[tau(S) = S] = 1 / C(d, |S|) per monomial
  const double a = 1.0 / std::sqrt(3.0);
  FourierFunction stair = make_fourier(3, {{0b001, a}, {0b011, a}, {0b111, a}});
  for (int d = 4; d <= 6; ++d) {
    PermutedClassGram g = gram_permuted_class(stair, d, 1, false);
    long long total = 0;
    for (long long c : g.count) total += c;
    double fact = 1.0;
    for (int i = 2; i <= d; ++i) fact *= i;
    CHECK(static_cast<double>(total) == fact);
    const double want =
        (1.0 / binom(d, 1) + 1.0 / binom(d, 2) + 1.0 / binom(d, 3)) / 3.0;
    CHECK(std::fabs(average_row_inner(g) - want) <= 1e-12);
  }

  // two degree-2 monomials, cross terms included: 4 ordered pairs hit each other
  FourierFunction two =
      make_fourier(4, {{0b0011, 0.5}, {0b1100, 0.5}});
  for (int d = 4; d <= 6; ++d) {
    PermutedClassGram g = gram_permuted_class(two, d, 2, true);
    CHECK(std::fabs(average_row_inner(g) - 1.0 / binom(d, 2)) <= 1e-12);
  }
}

TEST_CASE("projection degree filters the staircase monomials") {
  // degree >= 2 drops the singleton, scaling the diagonal to 2/3
  const double a = 1.0 / std::sqrt(3.0);
  FourierFunction stair = make_fourier(3, {{0b001, a}, {0b011, a}, {0b111, a}});
  PermutedClassGram g = gram_permuted_class(stair, 4, 2, false);
  CHECK(g.G[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  const double want = (1.0 / binom(4, 2) + 1.0 / binom(4, 3)) / 3.0;
  CHECK(std::fabs(average_row_inner(g) - want) <= 1e-12);
}

TEST_CASE("normal quantile inverts the usual table points") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-6));
  CHECK(normal_quantile(0.1) == doctest::Approx(-normal_quantile(0.9)).epsilon(1e-9));
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("berry-esseen distance for the single spike") {
  // <v,r>/||v|| is a Rademacher sign; W1 to N(0,1) is 2 int_{1/2}^1 |1 - Phi^{-1}(u)| du
  Rng rng(91, "be-spike");
  BerryEsseenResult r = berry_esseen_w1({1.0}, 100000, rng);
  CHECK(r.bound == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.w1 == doctest::Approx(0.5353772).epsilon(0.02));
  CHECK(r.w1 <= r.bound);
}

TEST_CASE("berry-esseen bound holds on random vectors") {
  Rng rng(17, "be-random");
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 6);
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    BerryEsseenResult r = berry_esseen_w1(v, 20000, rng);
    CHECK(r.w1 <= r.bound);
  }
}

TEST_CASE("legendre anticoncentration on a linear polynomial") {
  PolyGrid h;
  h.vars = 1;
  h.D = 1;
  h.c = {0.0, 1.0};  // h(x) = x
  REQUIRE(h.span() == 2);
  LegendreReport rep = legendre_anticoncentration(h);
  CHECK(rep.second_moment == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(rep.l1_mass == doctest::Approx(1.0).epsilon(1e-14));
  double parseval = 0.0;
  for (double gi : rep.g) parseval += gi * gi;
  CHECK(std::fabs(parseval - rep.second_moment) <= 1e-14);
  CHECK(rep.constant > 0.0);
  CHECK(rep.second_moment >= rep.constant * rep.l1_mass * rep.l1_mass - 1e-15);
}

TEST_CASE("shift-scale recenters a univariate square exactly") {
  PolyGrid h;
  h.vars = 1;
  h.D = 2;
  h.c = {0.0, 0.0, 1.0};  // h(x) = x^2
  PolyGrid s = poly_shift_scale(h, {0.5}, {0.25});
  REQUIRE(s.c.size() == 3);
  // (0.5 + 0.25 u)^2 = 0.25 + 0.25 u + 0.0625 u^2
  CHECK(s.c[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(s.c[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(s.c[2] == doctest::Approx(0.0625).epsilon(1e-14));
}

TEST_CASE("parseval survives shift-scale on a random grid") {
  Rng rng(23, "grid");
  PolyGrid h;
  h.vars = 2;
  h.D = 2;
  h.c.resize(h.span());
  for (double& x : h.c) x = rng.uniform(-1.0, 1.0);
  std::vector<double> w = {0.2, -0.3}, rho = {0.6, 0.5};
  LegendreReport rep = legendre_anticoncentration(poly_shift_scale(h, w, rho));
  double parseval = 0.0;
  for (double gi : rep.g) parseval += gi * gi;
  CHECK(std::fabs(parseval - rep.second_moment) <= 1e-12 * (1.0 + rep.second_moment));
}

TEST_CASE("bound report formatting") {
  BoundReport pk = polyk_bound(4, 2, 1, 1.0);
  std::string line = bound_report_line(pk);
  CHECK(line.find("bound=6") != std::string::npos);
  std::string row = bound_report_csv_row(pk);
  CHECK(row.rfind("6,0", 0) == 0);
}
