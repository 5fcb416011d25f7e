#include "doctest.h"

#include <cmath>
#include <vector>

#include "core/activation.hpp"
#include "core/rng.hpp"

using namespace msplab;

namespace {

// central finite difference of the value
double fd(const Activation& a, double x) {
  return (a.value(x + 5e-6) - a.value(x - 5e-6)) / 1e-5;
}

}  // namespace

TEST_CASE("shifted sigmoid values and taylor data") {
  Activation s = Activation::shifted_sigmoid(0.5);
  const double s0 = 1.0 / (1.0 + std::exp(0.5));
  CHECK(s.value(0.0) == doctest::Approx(s0).epsilon(1e-15));
  CHECK(s.value(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.taylor(0) == doctest::Approx(s0).epsilon(1e-14));
  CHECK(s.taylor(1) == doctest::Approx(s0 * (1.0 - s0)).epsilon(1e-13));
  CHECK(s.deriv(0.3) == doctest::Approx(s.value(0.3) * (1.0 - s.value(0.3))).epsilon(1e-13));
}

TEST_CASE("truncated power clamps outside (-1,1)") {
  Activation p = Activation::truncated_power(3);
  CHECK(p.value(0.5) == doctest::Approx(std::pow(1.5, 3)).epsilon(1e-15));
  CHECK(p.value(0.0) == doctest::Approx(1.0));
  const double hi = p.value(1.0);
  CHECK(p.value(2.7) == hi);   // constant beyond the right edge
  CHECK(p.value(-1.5) == p.value(-1.0));
  CHECK(p.deriv(1.5) == 0.0);
  CHECK(p.clamp_count() > 0);  // the clamped evaluations were counted
  // sigma^{(r)}(0) = L! / (L-r)!
  CHECK(p.taylor(1) == doctest::Approx(3.0));
  CHECK(p.taylor(2) == doctest::Approx(6.0));
  CHECK(p.taylor(3) == doctest::Approx(6.0));
  CHECK(p.taylor(4) == 0.0);
}

TEST_CASE("polynomial activation is its own taylor series") {
  std::vector<double> m = {0.1, 0.8, -0.3, 0.05};
  Activation a = Activation::polynomial(m);
  for (int r = 0; r < 4; ++r) CHECK(a.taylor(r) == doctest::Approx(m[r]));
  CHECK(a.taylor(4) == 0.0);
  const double x = 0.37;
  double want = 0.0, fact = 1.0;
  for (int r = 0; r < 4; ++r) {
    if (r > 0) fact *= r;
    want += m[r] * std::pow(x, r) / fact;
  }
  CHECK(a.value(x) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("tanh and its odd taylor series") {
  Activation a = Activation::tanh_act();
  CHECK(a.value(0.4) == doctest::Approx(std::tanh(0.4)).epsilon(1e-15));
  CHECK(a.taylor(0) == 0.0);
  CHECK(a.taylor(1) == doctest::Approx(1.0));
  CHECK(a.taylor(2) == 0.0);
  CHECK(a.taylor(3) == doctest::Approx(-2.0));
}

TEST_CASE("perturbed activation adds the polynomial bump") {
  Activation base = Activation::tanh_act();
  Activation a = Activation::perturbed(base, {0.0, 0.02});
  const double x = 0.3;
  CHECK(a.value(x) == doctest::Approx(base.value(x) + 0.02 * x).epsilon(1e-14));
  CHECK(a.taylor(1) == doctest::Approx(base.taylor(1) + 0.02));
  CHECK(!a.describe().empty());
}

TEST_CASE("derivatives agree with finite differences for every kind") {
  const std::vector<Activation> acts = {
      Activation::shifted_sigmoid(0.5),     Activation::shifted_sigmoid(2.5),
      Activation::truncated_power(4),       Activation::polynomial({0.1, 0.8, -0.3, 0.05}),
      Activation::tanh_act(),               Activation::perturbed(Activation::tanh_act(), {0.0, 0.02})};
  Rng rng(19, "test-act");
  for (const auto& a : acts)
    for (int i = 0; i < 10; ++i) {
      const double x = rng.uniform(-0.8, 0.8);
      CHECK(std::fabs(fd(a, x) - a.deriv(x)) <= 1e-6 * std::max(1.0, std::fabs(a.deriv(x))));
    }
}

TEST_CASE("taylor partial sums converge near zero") {
  const std::vector<Activation> acts = {Activation::shifted_sigmoid(1.0),
                                        Activation::tanh_act(),
                                        Activation::truncated_power(5)};
  for (const auto& a : acts) {
    const double x = 0.05;
    double sum = 0.0, fact = 1.0;
    for (int r = 0; r <= 9; ++r) {
      if (r > 0) fact *= r;
      sum += a.taylor(r) * std::pow(x, r) / fact;
    }
    CHECK(std::fabs(sum - a.value(x)) <= 1e-8);
  }
}

TEST_CASE("taylor_upto matches element-wise taylor") {
  Activation a = Activation::shifted_sigmoid(1.0);
  std::vector<double> v = a.taylor_upto(5);
  REQUIRE(v.size() == 6);
  for (int r = 0; r <= 5; ++r) CHECK(v[r] == doctest::Approx(a.taylor(r)));
}
