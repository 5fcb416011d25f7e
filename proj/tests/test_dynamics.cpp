#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "core/dynamics.hpp"
#include "core/experiments.hpp"
#include "core/fourier.hpp"
#include "core/quadrature.hpp"
#include "core/trace.hpp"

using namespace msplab;

namespace {

FourierFunction chain3() {
  return make_fourier(3, {{0b001, 1.0}, {0b011, 1.0}, {0b111, 1.0}});
}

}  // namespace

TEST_CASE("ensemble starts at the legendre nodes with u = 0") {
  QuadratureRule gl = legendre_rule(16);
  EffectiveEnsemble e = make_ensemble(3, gl, 0.7);
  REQUIRE(e.size() == 16);
  double wsum = 0.0;
  for (int j = 0; j < e.size(); ++j) {
    wsum += e.w[j];
    CHECK(e.pts[j].a == gl.x[j]);
    CHECK(e.pts[j].s == 0.7);
    for (double ui : e.pts[j].u) CHECK(ui == 0.0);
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("initial risk equals the target second moment") {
  // u = 0 and E[a] = 0 make the initial predictor vanish identically
  FourierFunction h = chain3();
  Activation act = Activation::shifted_sigmoid(0.5);
  EffectiveEnsemble e = make_ensemble(3, legendre_rule(32), 1.0);
  QuadratureRule herm = hermite_rule(21);
  CHECK(effective_risk(e, h, act, herm) == doctest::Approx(h.norm2()).epsilon(1e-12));
  std::vector<double> fv = effective_predict_all(e, act, herm);
  REQUIRE(fv.size() == 8);
  for (std::uint32_t z = 0; z < 8; ++z) {
    CHECK(std::fabs(fv[z]) < 1e-14);
    CHECK(effective_predict(e, act, herm, z) == doctest::Approx(fv[z]));
  }
}

TEST_CASE("effective dynamics reduce the risk on a learnable target") {
  FourierFunction h = chain3();
  Activation act = Activation::shifted_sigmoid(0.5);
  DfpdeOptions opt;
  opt.T = 2.0;
  opt.delta = 0.02;
  opt.record_dt = 0.5;
  DfpdeResult r = dfpde_integrate(h, make_ensemble(3, legendre_rule(32), 1.0),
                                  Schedules{}, act, opt);
  CHECK(!r.diverged);
  REQUIRE(r.trace.records() == 5);
  CHECK(r.trace.t.front() == 0.0);
  CHECK(r.trace.t.back() == doctest::Approx(2.0));
  CHECK(r.trace.tracked == h.support());
  CHECK(r.trace.risk.front() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.trace.risk.back() < r.trace.risk.front());
  for (const auto& row : r.trace.coeff) REQUIRE(row.size() == 3);
}

TEST_CASE("bare parity stays pinned at its plateau") {
  FourierFunction h = make_fourier(3, {{0b111, 1.0}});
  Activation act = Activation::shifted_sigmoid(0.5);
  MspResult m = msp_check(h);
  REQUIRE(!m.is_msp);
  DfpdeOptions opt;
  opt.T = 1.0;
  opt.record_dt = 0.25;
  opt.hermite_nodes = 21;
  ChunkedRun run = dfpde_chunked(h, make_ensemble(3, legendre_rule(32), 1.0), Schedules{},
                                 act, opt, m.blocked_mask, {}, m.stuck_risk_lower_bound);
  CHECK(!run.diverged);
  CHECK(run.max_blocked <= 1e-12);  // blocked coordinates stay at roundoff level
  CHECK(std::fabs(run.min_risk_margin) <= 1e-12);
}

TEST_CASE("symmetrize projects onto the fixed manifold") {
  EffectiveEnsemble e = make_ensemble(2, legendre_rule(4), 0.5);
  e.pts[1].u = {0.3, 0.5};
  e.pts[2].u = {-0.1, 0.1};
  std::vector<std::vector<int>> perms = {{1, 0}};
  CHECK(symmetry_gap(e, perms[0]) == doctest::Approx(0.2));
  symmetrize(e, perms);
  CHECK(e.pts[1].u[0] == doctest::Approx(0.4));
  CHECK(e.pts[1].u[1] == doctest::Approx(0.4));
  CHECK(symmetry_gap(e, perms[0]) == 0.0);
  EffectiveEnsemble before = e;
  symmetrize(e, perms);  // idempotent
  for (int j = 0; j < e.size(); ++j)
    for (int i = 0; i < e.P; ++i) CHECK(e.pts[j].u[i] == before.pts[j].u[i]);
}

TEST_CASE("shared-measure gap scores predictions under the sgd test set") {
  BsgdResult sgd;
  sgd.trace.tracked = {0b01};
  sgd.trace.add(0.0, 1.0, 0.0, {0.2});
  sgd.trace.add(1.0, 0.5, 0.0, {0.4});
  sgd.test_z = {0b01, 0b00};
  // rows are per-record values on the hypercube, indexed by z mask
  std::vector<std::vector<double>> pred = {{-0.2, 0.2}, {-0.1, 0.7}};
  CHECK(shared_measure_gap(pred, sgd) < 1e-15);
  pred[1][1] = 0.9;  // effective coefficient becomes 0.5
  CHECK(shared_measure_gap(pred, sgd) == doctest::Approx(0.1));
  // extra sgd records beyond the snapshots are ignored
  sgd.trace.add(2.0, 0.25, 0.0, {7.0});
  CHECK(shared_measure_gap(pred, sgd) == doctest::Approx(0.1));
}

TEST_CASE("sgd trace shape, determinism and test-set bookkeeping") {
  FourierFunction h = chain3();
  Activation act = Activation::shifted_sigmoid(0.5);
  BsgdParams p;
  p.d = 24;
  p.N = 16;
  p.b = 12;
  p.eta = 0.25;
  p.steps = 40;
  p.record_every = 5;
  p.test_m = 50;
  p.seed = RngSpec{42, "bsgd"};
  BsgdResult r1 = bsgd_train(h, act, p);
  CHECK(!r1.diverged);
  REQUIRE(r1.trace.records() == 9);
  CHECK(r1.trace.t.front() == 0.0);
  CHECK(r1.trace.t.back() == doctest::Approx(10.0));
  REQUIRE(r1.test_z.size() == 50);
  for (std::uint32_t zm : r1.test_z) CHECK(zm < 8u);
  CHECK(static_cast<int>(r1.a.size()) == p.N);
  CHECK(static_cast<int>(r1.w.size()) == p.N);

  BsgdResult r2 = bsgd_train(h, act, p);
  CHECK(trace_csv(r1.trace) == trace_csv(r2.trace));  // byte-identical rerun
  CHECK(r1.test_z == r2.test_z);

  p.seed = RngSpec{43, "bsgd"};
  BsgdResult r3 = bsgd_train(h, act, p);
  CHECK(trace_csv(r1.trace) != trace_csv(r3.trace));
}

TEST_CASE("sgd tracks the effective dynamics at moderate width") {
  FourierFunction h = chain3();
  Activation act = Activation::shifted_sigmoid(0.5);

  DfpdeOptions opt;
  opt.T = 10.0;
  opt.delta = 0.01;
  opt.record_dt = 0.5;
  opt.hermite_nodes = 21;
  ChunkedRun pde = dfpde_chunked(h, make_ensemble(3, legendre_rule(48), 1.0), Schedules{},
                                 act, opt, 0, {}, 0.0, /*keep_snapshots=*/true);
  REQUIRE(pde.snapshots.size() == pde.trace.t.size());
  QuadratureRule herm = hermite_rule(21);
  std::vector<std::vector<double>> pred(pde.snapshots.size());
  for (std::size_t i = 0; i < pde.snapshots.size(); ++i)
    pred[i] = effective_predict_all(pde.snapshots[i], act, herm);

  BsgdParams p;
  p.d = 64;
  p.N = 64;
  p.b = 64;
  p.eta = 0.25;
  p.steps = 40;
  p.record_every = 2;  // records every 0.5 time units, same grid as above
  p.test_m = 2000;
  p.seed = RngSpec{7, "bsgd"};
  BsgdResult sgd = bsgd_train(h, act, p);
  CHECK(!sgd.diverged);
  CHECK(shared_measure_gap(pred, sgd) < 0.35);
}
