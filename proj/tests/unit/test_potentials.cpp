#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "twistab/errors.hpp"
#include "twistab/geometry.hpp"
#include "twistab/potentials.hpp"

using namespace twistab;

namespace {

std::vector<PairPotential> families() {
  return {presets::lennard_jones_bg(), presets::morse_bg(), presets::kolmogorov_crespi_bg(),
          presets::product_morse_lj_bg()};
}

PairPotential random_draw(int family, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.8, 1.25);
  PairPotential p = families()[family];
  std::visit(
      [&](auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LennardJones>) {
          k.eps0 *= u(rng);
          k.sigma *= u(rng);
        } else if constexpr (std::is_same_v<T, Morse>) {
          k.e0 *= u(rng);
          k.kappa *= u(rng);
          k.r0 *= u(rng);
        } else if constexpr (std::is_same_v<T, KolmogorovCrespi>) {
          k.c *= u(rng);
          k.c0 *= u(rng);
          k.delta *= u(rng);
          k.lambda *= u(rng);
          k.a0 *= u(rng);
          k.z0 *= u(rng);
        } else {
          k.e0 *= u(rng);
          k.kappa *= u(rng);
          k.sigma *= u(rng);
        }
      },
      p.kind);
  p.height *= u(rng);
  return p;
}

}  // namespace

TEST_CASE("radial values at rho = 0") {
  const PairPotential lj = presets::lennard_jones_bg();
  CHECK(radial_value_derivs(lj, 0).g == doctest::Approx(oracle::lj(2.39, 3.41, 3.35)).epsilon(1e-14));
  PairPotential m = presets::morse_bg(3.6891);
  CHECK(radial_value_derivs(m, 0).g == doctest::Approx(-2.8437).epsilon(1e-12));
}

TEST_CASE("radial derivatives match finite differences") {
  std::mt19937_64 rng(2024);
  for (int fam = 0; fam < 4; ++fam) {
    for (int draw = 0; draw < 20; ++draw) {
      const PairPotential p = random_draw(fam, rng);
      const double rho = 1.7;
      auto g = [&](double r) { return radial_value_derivs(p, r).g; };
      auto g1 = [&](double r) { return radial_value_derivs(p, r).g1; };
      const RadialDerivatives d = radial_value_derivs(p, rho);
      CAPTURE(kind_name(p));
      CHECK(oracle::rel(d.g1, oracle::d1(g, rho, 1e-4)) < 1e-5);
      CHECK(oracle::rel(d.g2, oracle::d1(g1, rho, 1e-4)) < 1e-5);
    }
  }
}

TEST_CASE("hessian3d against finite differences and symmetry") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (const PairPotential& p : families()) {
    for (int s = 0; s < 10; ++s) {
      const Vec2 x(u(rng), u(rng));
      const double z = 3.35 + 0.1 * u(rng);
      const Mat3 h = hessian3d(p, x, z);
      CHECK((h - h.transpose()).norm() == 0.0);
      auto v = [&](const Vec3& q) { return value(p, q.head<2>(), q(2)); };
      const Vec3 q0(x(0), x(1), z);
      const double step = 5e-4;
      Mat3 fd;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const Vec3 ea = Vec3::Unit(a) * step, eb = Vec3::Unit(b) * step;
          fd(a, b) = (v(q0 + ea + eb) - v(q0 + ea - eb) - v(q0 - ea + eb) + v(q0 - ea - eb)) / (4 * step * step);
        }
      CAPTURE(kind_name(p));
      CHECK((h - fd).norm() / h.norm() < 1e-5);
    }
  }
}

TEST_CASE("hessian3d at x = 0 and rotation equivariance") {
  const PairPotential lj = presets::lennard_jones_bg();
  const Mat3 h0 = hessian3d(lj, Vec2::Zero(), 3.35);
  auto f = [](double r) { return oracle::lj(2.39, 3.41, r); };
  const double lim = oracle::d1(f, 3.35, 1e-5) / 3.35;
  CHECK(h0(0, 0) == doctest::Approx(lim).epsilon(1e-6));
  CHECK(h0(1, 1) == doctest::Approx(lim).epsilon(1e-6));
  CHECK(std::abs(h0(0, 1)) < 1e-14);

  for (const PairPotential& p : families()) {
    const Vec2 x(1.3, -0.7);
    const Mat2 r = rotation(0.83);
    Mat3 big = Mat3::Identity();
    big.topLeftCorner<2, 2>() = r;
    const Mat3 lhs = hessian3d(p, r * x, 3.4);
    const Mat3 rhs = big * hessian3d(p, x, 3.4) * big.transpose();
    CHECK((lhs - rhs).norm() / rhs.norm() < 1e-10);
  }
}

TEST_CASE("printed closed forms of m(z)") {
  CHECK(m_closed(presets::lennard_jones_bg(), 3.35) == doctest::Approx(-483.5).epsilon(0.5 / 483.5));
  CHECK(m_closed(presets::morse_bg(), 3.35) == doctest::Approx(-352.8).epsilon(0.5 / 352.8));
  CHECK(m_closed(presets::product_morse_lj_bg(), 3.35) == doctest::Approx(11.6e3 * 1e3).epsilon(0.01));
  CHECK_THROWS_AS(m_closed(presets::kolmogorov_crespi_bg(), 3.35), NoClosedForm);
}

TEST_CASE("quadrature identity for 3D-radial families") {
  for (const PairPotential& p : {presets::lennard_jones_bg(), presets::morse_bg()}) {
    for (double z = 2.5; z <= 5.0 + 1e-12; z += 0.25) {
      std::function<double(double)> g = [&](double r) { return radial_profile(p, r).g; };
      const double ident = -2 * kPi * (z * oracle::d1(g, z, 1e-5) + g(z));
      const MzQuadrature q = m_quadrature_detailed(p, z);
      CAPTURE(z);
      CHECK(oracle::rel(q.value, ident) < 1e-6);
      CHECK(q.error <= std::max(1e-6 * std::abs(q.value), 1e-9));
    }
  }
}

TEST_CASE("product family moment identity") {
  const PairPotential p = presets::product_morse_lj_bg();
  const auto& k = std::get<ProductMorseLJ>(p.kind);
  std::function<double(double)> f1 = [&](double r) { return r * oracle::morse(k.e0, k.kappa, k.r0, r); };
  const double moment = oracle::simpson(f1, 0, 40, 40000);
  CHECK(oracle::rel(moment, k.e0 / (4 * k.kappa * k.kappa) *
                                (std::exp(2 * k.kappa * k.r0) - 8 * std::exp(k.kappa * k.r0))) < 1e-8);
  for (double z : {3.0, 3.35, 4.0}) {
    std::function<double(double)> f2 = [&](double r) { return oracle::lj(1.0, k.sigma, r); };
    const double expect = 2 * kPi * moment * oracle::d2(f2, z, 1e-4);
    CHECK(oracle::rel(m_quadrature(p, z), expect) < 1e-6);
  }
}

TEST_CASE("in-plane block of the averaged Hessian vanishes") {
  for (const PairPotential& p : families()) {
    const MzQuadrature a = inplane_average(p, p.height);
    const double scale = std::abs(m_quadrature(p, p.height));
    CAPTURE(kind_name(p));
    CHECK(std::abs(a.value) <= std::max(1e-6 * scale, 10 * a.error));
  }
}

TEST_CASE("comparison report exposes printed discrepancies") {
  const MzComparison c = compare_mz(presets::lennard_jones_bg(), 3.35);
  REQUIRE(c.closed);
  REQUIRE(c.identity);
  REQUIRE(c.printed_general);
  CHECK(*c.closed == doctest::Approx(-*c.identity).epsilon(1e-9));
  CHECK(oracle::rel(*c.identity, c.quadrature) < 1e-6);
  CHECK(std::abs(*c.printed_general - c.quadrature) > 100);
  const MzComparison pm = compare_mz(presets::product_morse_lj_bg(), 3.35);
  REQUIRE(pm.product_derived);
  CHECK(*pm.closed / *pm.product_derived == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("sign transitions") {
  const double s = 3.41;
  const auto lj = sign_transition(presets::lennard_jones_bg(), 3.0, 4.5, MzMethod::closed);
  REQUIRE(lj.size() == 1);
  CHECK(oracle::rel(lj[0], std::pow(11.0 / 5.0, 1.0 / 6.0) * s) < 1e-6);

  const auto pm = sign_transition(presets::product_morse_lj_bg(), 3.0, 5.0, MzMethod::closed);
  REQUIRE(pm.size() == 1);
  CHECK(oracle::rel(pm[0], std::pow(26.0 / 7.0, 1.0 / 6.0) * s) < 1e-6);

  const PairPotential m = presets::morse_bg();
  const auto& k = std::get<Morse>(m.kind);
  const auto roots = sign_transition(m, 0.05, 20.0, MzMethod::closed);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] <= std::min(2 / k.kappa, k.r0));
  CHECK(roots[1] >= std::max(2 / k.kappa, k.r0));

  CHECK_THROWS_AS(sign_transition(presets::lennard_jones_bg(), 4.0, 4.5, MzMethod::closed), NoRootInBracket);
}

TEST_CASE("invalid parameters") {
  PairPotential p = presets::lennard_jones_bg();
  std::get<LennardJones>(p.kind).sigma = -1;
  CHECK_THROWS_AS(validate(p), InvalidParameter);
  CHECK_THROWS_AS(m_quadrature(presets::morse_bg(), 0.0), InvalidParameter);
}
