#include <doctest.h>

#include <cmath>

#include "twistab/geometry.hpp"
#include "twistab/ergodic.hpp"

using namespace twistab;

namespace {

ErgodicExperiment experiment(double deg, TestFunction f, int layer = 1) {
  ErgodicExperiment e;
  e.geom = build_twisted_pair(graphene_basis(), deg * kPi / 180.0);
  e.layer = layer;
  e.f = f;
  e.omega_moire = Vec2(0.37, 0.11);
  e.omega = Vec2(0.21, -0.4);
  return e;
}

TestFunction character(std::array<int, 2> km, std::array<int, 2> kl, double phase) {
  TestFunction f;
  f.family = TestFamily::character;
  f.k_moire = km;
  f.k_layer = kl;
  f.phase = phase;
  return f;
}

}  // namespace

TEST_CASE("constants are exact") {
  TestFunction one;
  one.family = TestFamily::constant;
  one.amplitude = 2.5;
  const ErgodicExperiment e = experiment(2.0, one);
  for (int n : {1, 7, 50}) CHECK(truncated_average(e, n) == doctest::Approx(2.5).epsilon(1e-14));
  const ConvergenceCurve c = convergence_curve(e, {25, 50});
  CHECK(c.exact);
  for (const auto& r : c.rows) CHECK(r.abs_err < 1e-13);
}

TEST_CASE("limits by quadrature") {
  const ErgodicExperiment c = experiment(2.0, character({1, 0}, {0, 0}, 0.3));
  CHECK(std::abs(ergodic_limit(c).value) < 1e-9);

  TestFunction vm;
  vm.family = TestFamily::von_mises;
  vm.kappa = 1.0;
  const ErgodicExperiment v = experiment(2.0, vm);
  const double i0 = std::cyl_bessel_i(0.0, 1.0);
  CHECK(ergodic_limit(v).value == doctest::Approx(i0 * i0).epsilon(1e-9));
}

TEST_CASE("nonconstant character averages decay") {
  for (int layer : {1, 2}) {
    const ErgodicExperiment e = experiment(2.0, character({1, 0}, {0, 0}, 0.3), layer);
    const ConvergenceCurve c = convergence_curve(e, {25, 50, 100, 200});
    CHECK(c.slope <= -0.8);
    CHECK_FALSE(c.degraded);
    CHECK(std::abs(c.rows.back().value) < 1e-2);
  }
}

TEST_CASE("matched product character is averaged exactly") {
  // k_moire = k_layer makes the summand constant along the lattice
  const ErgodicExperiment e = experiment(2.0, character({1, 2}, {1, 2}, 0.4));
  const ConvergenceCurve c = convergence_curve(e, {10, 20});
  for (const auto& r : c.rows) CHECK(r.abs_err < 1e-12);
}

TEST_CASE("smooth Gaussian-type function converges") {
  TestFunction vm;
  vm.family = TestFamily::von_mises;
  vm.kappa = 1.0;
  const ConvergenceCurve c = convergence_curve(experiment(2.0, vm), {25, 50, 100, 200});
  CHECK(c.slope <= -0.8);
  CHECK(c.rows.back().abs_err < 1e-2);
}

TEST_CASE("tiny twist degrades the rate") {
  const ConvergenceCurve c = convergence_curve(experiment(0.01, character({1, 0}, {0, 0}, 0.3)), {25, 50, 100, 200});
  CHECK(c.degraded);
}

TEST_CASE("log-log slope") {
  CHECK(loglog_slope({1, 2, 4, 8}, {1, 0.25, 0.0625, 0.015625}) == doctest::Approx(-2.0));
}
