#include <doctest.h>

#include <random>

#include "twistab/errors.hpp"
#include "twistab/geometry.hpp"
#include "twistab/relax.hpp"

using namespace twistab;

namespace {

const Mat2 kA = graphene_basis();

RelaxProblem gsfe_problem(double eps, int res, double lam = 10, double mu = 10) {
  return RelaxProblem::make(MisfitSurface::gsfe(), ElasticityTensor::make(lam, mu, kA), eps, res);
}

double grid_dot(const DisplacementField& a, const DisplacementField& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.u1[k] * b.u1[k] + a.u2[k] * b.u2[k];
  return s / double(a.size());
}

DisplacementField axpy(const DisplacementField& u, double h, const DisplacementField& d) {
  DisplacementField out = u;
  for (std::size_t k = 0; k < u.size(); ++k) {
    out.u1[k] += h * d.u1[k];
    out.u2[k] += h * d.u2[k];
  }
  return out;
}

}  // namespace

TEST_CASE("elasticity tensor") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  const ElasticityTensor e = ElasticityTensor::make(3.0, 2.0, kA);
  for (int s = 0; s < 200; ++s) {
    Mat2 m;
    m << u(rng), u(rng), u(rng), u(rng);
    const Mat2 sym = 0.5 * (m + m.transpose());
    const double direct = 3.0 * std::pow(m.trace(), 2) + 2.0 * (m.cwiseProduct(m.transpose()).sum() + m.squaredNorm());
    CHECK(e.contract(m) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(e.contract(m) >= 2.0 * sym.squaredNorm() - 1e-12);
  }
  CHECK_THROWS_AS(ElasticityTensor::make(1.0, 0.0, kA), InvalidParameter);
  CHECK_THROWS_AS(ElasticityTensor::make(-2.0, 1.0, kA), InvalidParameter);
}

TEST_CASE("energy of trivial fields") {
  const double c0 = GsfeSource{}.c0;
  for (double eps : {0.5, 1.0}) {
    const RelaxProblem p = gsfe_problem(eps, 16);
    CHECK(energy(p, DisplacementField::zero(16)) == doctest::Approx(c0 / eps).epsilon(1e-12));
    const DisplacementField c = DisplacementField::constant(16, Vec2(0.123, -0.31));
    CHECK(energy(p, c) == doctest::Approx(c0 / eps).epsilon(1e-12));
  }
  const RelaxProblem p = gsfe_problem(1.0, 16);
  const DisplacementField u = DisplacementField::smooth_random(16, 0.05, 3);
  const DisplacementField v = axpy(u, 1.0, DisplacementField::constant(16, Vec2(0.5, -1.0)));
  CHECK(energy(p, v) == doctest::Approx(energy(p, u)).epsilon(1e-12));
  CHECK_THROWS_AS(energy(p, DisplacementField::zero(8)), InvalidParameter);
}

TEST_CASE("gradient is consistent with the discrete energy") {
  const RelaxProblem p = gsfe_problem(0.3, 16);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DisplacementField u = DisplacementField::smooth_random(16, 0.08, seed);
    const DisplacementField d = DisplacementField::smooth_random(16, 1.0, seed + 100);
    const double h = 1e-5;
    const double fd = (energy(p, axpy(u, h, d)) - energy(p, axpy(u, -h, d))) / (2 * h);
    const double an = grid_dot(gradient(p, u), d);
    CHECK(std::abs(fd - an) <= 1e-6 * std::abs(an));
  }
}

TEST_CASE("gradient at zero and mean projection") {
  const RelaxProblem p = gsfe_problem(0.5, 12);
  const MisfitSurface s = MisfitSurface::gsfe();
  const DisplacementField g = gradient(p, DisplacementField::zero(12));
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      const Vec2 expect = (2 / 0.5) * misfit_grad_hessian(s, Vec2(i / 12.0, j / 12.0)).grad;
      CHECK((g.at(i, j) - expect).norm() < 1e-10);
    }
  const DisplacementField raw = gradient(p, DisplacementField::smooth_random(12, 0.1, 9));
  const DisplacementField q = project_mean_zero(raw);
  double scale = 0;
  for (std::size_t k = 0; k < raw.size(); ++k) scale = std::max({scale, std::abs(raw.u1[k]), std::abs(raw.u2[k])});
  CHECK(q.mean().norm() < 1e-14 * scale);
}

TEST_CASE("minimizer descent, monotone trace and restart") {
  const RelaxProblem p = gsfe_problem(1.0, 32);
  const DisplacementField u0 = DisplacementField::smooth_random(32, 1e-3, 0);
  const MinimizeResult r = minimize(p, u0, 1e-6);
  CHECK(r.diagnostics.converged);
  CHECK(r.diagnostics.final_grad_inf < 1e-6);
  CHECK(r.diagnostics.final_energy <= energy(p, u0));
  for (std::size_t k = 1; k < r.diagnostics.trace.size(); ++k)
    CHECK(r.diagnostics.trace[k].energy <= r.diagnostics.trace[k - 1].energy);
  CHECK(r.u.mean().norm() < 1e-12);
  const MinimizeResult again = minimize(p, r.u, 1e-6);
  CHECK(again.diagnostics.iterations <= 1);
}

TEST_CASE("stiff limit keeps the field near zero") {
  const RelaxProblem p = gsfe_problem(1e3, 16);
  const MinimizeResult r = minimize(p, DisplacementField::smooth_random(16, 1e-2, 4), 1e-10);
  double umax = 0;
  for (std::size_t k = 0; k < r.u.size(); ++k) umax = std::max({umax, std::abs(r.u.u1[k]), std::abs(r.u.u2[k])});
  CHECK(umax < 1e-6);
  CHECK(r.diagnostics.final_energy == doctest::Approx(GsfeSource{}.c0 / 1e3).epsilon(1e-6));
}

TEST_CASE("non-convergence is reported") {
  const RelaxProblem p = gsfe_problem(0.25, 16);
  MinimizeOptions o;
  o.max_iter = 3;
  const MinimizeResult r = minimize(p, DisplacementField::smooth_random(16, 1e-3, 0), 1e-12, o);
  CHECK_FALSE(r.diagnostics.converged);
  CHECK(r.diagnostics.iterations == 3);
}

TEST_CASE("stacking field and occupancy") {
  const int n = 64;
  const std::vector<Vec2> id = stacking_field(DisplacementField::zero(n));
  CHECK((id[5 * n + 7] - Vec2(5.0 / n, 7.0 / n)).norm() < 1e-15);
  const std::vector<Vec2> sh = stacking_field(DisplacementField::constant(n, Vec2(1.0 / 6, 1.0 / 6)));
  CHECK(torus_distance(sh[5 * n + 7], Vec2(5.0 / n + 1.0 / 3, 7.0 / n + 1.0 / 3)) < 1e-14);
  const double delta = 0.05;
  const double occ = well_occupancy(stacking_field(DisplacementField::zero(128)), delta);
  CHECK(occ == doctest::Approx(2 * kPi * delta * delta).epsilon(0.05));
  CHECK(well_occupancy(std::vector<Vec2>(100, Vec2(1.0 / 3, 1.0 / 3)), delta) == 1.0);
  CHECK(torus_distance(Vec2(0.99, 0.0), Vec2(0.01, 0.0)) == doctest::Approx(0.02));
  CHECK_THROWS_AS(well_occupancy(id, 0.2), InvalidParameter);
}

TEST_CASE("checkpoint round trip and interpolation") {
  const DisplacementField u = DisplacementField::smooth_random(16, 0.02, 12);
  const DisplacementField back = read_checkpoint(write_checkpoint(u));
  CHECK(back.grid_res == 16);
  CHECK(back.u1 == u.u1);
  CHECK(back.u2 == u.u2);
  CHECK(write_checkpoint(u).rfind("u 16\n", 0) == 0);
  CHECK_THROWS(read_checkpoint("garbage"));

  // a band-limited field is reproduced off the grid
  DisplacementField f = DisplacementField::zero(16);
  auto exact = [](const Vec2& y) {
    return Vec2(0.1 * std::cos(2 * kPi * (y(0) + 2 * y(1))) - 0.03 * std::sin(2 * kPi * 3 * y(0)),
                0.05 * std::sin(2 * kPi * y(1) + 0.4));
  };
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const Vec2 v = exact(Vec2(i / 16.0, j / 16.0));
      f.u1[i * 16 + j] = v(0);
      f.u2[i * 16 + j] = v(1);
    }
  const TrigInterpolant t(f);
  for (const Vec2& y : {Vec2(0.123, 0.77), Vec2(0.5, 0.01), Vec2(-0.3, 1.4)}) CHECK((t(y) - exact(y)).norm() < 1e-12);
}
