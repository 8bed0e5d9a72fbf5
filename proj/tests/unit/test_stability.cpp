#include <doctest.h>

#include "twistab/errors.hpp"
#include "twistab/geometry.hpp"
#include "twistab/misfit.hpp"
#include "twistab/relax.hpp"
#include "twistab/stability.hpp"

using namespace twistab;

namespace {

const double kTheta = 1.1 * kPi / 180.0;

BilayerGeometry geom() { return build_twisted_pair(graphene_basis(), kTheta); }

}  // namespace

TEST_CASE("stable sum reproduces the misfit Hessian at zero relaxation") {
  const BilayerGeometry g = geom();
  const PairPotential p = presets::morse_bg();
  const Mat2 a = graphene_basis();
  const MisfitSurface s = MisfitSurface::lattice_sum(a, p, 20);
  const double cut = required_cutoff(g, p);
  const Mat2 r = rotation(kTheta / 2);
  for (const Vec2& y : {Vec2(1.0 / 3, 1.0 / 3), Vec2(2.0 / 3, 2.0 / 3), Vec2(0.2, 0.55)}) {
    const Mat3 m = stability_matrix(g, p, DifferenceField::zero(), g.a1 * y, cut);
    const Mat2 hred = misfit_grad_hessian(s, y).hess;
    const Mat2 expect = r * a.inverse().transpose() * hred * a.inverse() * r.transpose() * std::abs(a.determinant());
    CHECK((m.topLeftCorner<2, 2>() - expect).norm() / expect.norm() < 1e-6);
  }
}

TEST_CASE("stable sum symmetry and periodicity") {
  const BilayerGeometry g = geom();
  const PairPotential p = presets::lennard_jones_bg();
  const double cut = required_cutoff(g, p);
  const Vec2 x(0.37, -0.81);
  const Mat3 m0 = stability_matrix(g, p, DifferenceField::zero(), x, cut);
  const Mat3 m1 = stability_matrix(g, p, DifferenceField::zero(), x + g.a1 * Vec2(3, -2), cut);
  CHECK((m0 - m0.transpose()).norm() == 0.0);
  CHECK((m0 - m1).norm() <= 1e-12 * m0.norm());
  const Mat3 w = stability_matrix(g, p, DifferenceField::zero(), g.a1 * Vec2(1.0 / 3, 1.0 / 3), cut);
  CHECK(std::abs(w(0, 2)) < 1e-10 * w.norm());
  CHECK(std::abs(w(1, 2)) < 1e-10 * w.norm());
  CHECK_THROWS_AS(stability_matrix(g, p, DifferenceField::zero(), x, 10.0), CutoffTooSmall);
}

TEST_CASE("stable sum reports") {
  const BilayerGeometry g = geom();
  const PairPotential p = presets::lennard_jones_bg();
  const double cut = required_cutoff(g, p);
  const std::vector<Vec2> wells = {g.a1 * Vec2(1.0 / 3, 1.0 / 3), g.a1 * Vec2(2.0 / 3, 2.0 / 3)};
  const StabilityReport w = stability_report_at(g, p, DifferenceField::zero(), wells, cut);
  CHECK(w.verdict == Verdict::stable);
  CHECK(w.min_eig > 0);
  CHECK(w.n_samples == 2);

  const StabilityReport coarse = stability_report(g, p, DifferenceField::zero(), 12, cut);
  const StabilityReport fine = stability_report(g, p, DifferenceField::zero(), 24, cut);
  CHECK(fine.n_samples == 576);
  CHECK(std::abs(fine.min_eig - coarse.min_eig) < 1e-3);
  CHECK(std::abs(fine.worst_direction.norm() - 1) < 1e-12);
  CHECK(criterion_name(fine.criterion) == "StableSum");
  CHECK_THROWS_AS(stability_report(g, p, DifferenceField::zero(), 3, cut), InvalidParameter);
}

TEST_CASE("instability integral at zero relaxation") {
  const BilayerGeometry g = geom();
  const PairPotential p = presets::lennard_jones_bg();
  const InstabilityResult r = instability_matrix(g, p, DifferenceField::zero());
  const double m = m_quadrature(p, p.height);
  CHECK(r.matrix(2, 2) == doctest::Approx(m).epsilon(1e-6));
  CHECK(std::abs(r.matrix(2, 2)) == doctest::Approx(483.5).epsilon(0.01));
  CHECK(r.matrix.topLeftCorner<2, 2>().norm() < 1e-6 * std::abs(m));
  CHECK(std::abs(r.matrix(0, 2)) < 1e-6 * std::abs(m));
  CHECK(r.report.verdict != Verdict::unstable);
  CHECK(criterion_name(r.report.criterion) == "InstabilityIntegral");
}

TEST_CASE("negative curvature is detected by both routes") {
  const BilayerGeometry g = geom();
  const PairPotential p = presets::lennard_jones_bg(4.2);
  REQUIRE(m_quadrature(p, 4.2) < 0);
  const InstabilityResult r = instability_matrix(g, p, DifferenceField::zero());
  CHECK(r.report.verdict == Verdict::unstable);
  CHECK(std::abs(std::abs(r.report.worst_direction(2)) - 1) < 1e-6);
  const StabilityReport s = stability_report(g, p, DifferenceField::zero(), 4, required_cutoff(g, p));
  CHECK(s.verdict != Verdict::stable);
  CHECK(s.min_eig < 0);
}

TEST_CASE("instability integral is continuous in the relaxation field") {
  const BilayerGeometry g = geom();
  const PairPotential p = presets::morse_bg();
  const Mat3 m0 = instability_matrix(g, p, DifferenceField::zero()).matrix;
  const Vec2 b = g.b_moire.col(0);
  std::vector<double> dev;
  for (double amp : {1e-2, 1e-3}) {
    const DifferenceField f = DifferenceField::custom(
        [amp, b](const Vec2& x) { return Vec2(amp * std::cos(b.dot(x)), amp * std::sin(b.dot(x))); }, amp);
    dev.push_back((instability_matrix(g, p, f).matrix - m0).norm());
  }
  CHECK(dev[1] < dev[0]);
  CHECK(dev[0] < 1e-2 * m0.norm());
}

TEST_CASE("bump profile") {
  CHECK(bump_profile(0.0, 10, 2) == 1.0);
  CHECK(bump_profile(10.0, 10, 2) == 1.0);
  CHECK(bump_profile(12.0, 10, 2) == 0.0);
  CHECK(bump_profile(11.0, 10, 2) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double r = 10; r <= 12; r += 0.01) {
    CHECK(bump_profile(r, 10, 2) <= prev + 1e-15);
    prev = bump_profile(r, 10, 2);
  }
}

TEST_CASE("discrete ansatz prefactors and limit") {
  const BilayerGeometry g = geom();
  const double area = g.cell_area1;
  CHECK(ansatz_prefactor_printed(g) == doctest::Approx(2 * area / kPi).epsilon(1e-12));
  CHECK(ansatz_prefactor_derived(g) == doctest::Approx(2 / area).epsilon(1e-12));
  const PairPotential p = presets::morse_bg();
  const double target = ansatz_prefactor_derived(g) * m_quadrature(p, p.height);
  const double e20 = std::abs(discrete_form_value(g, p, 20 * 2.46) - target);
  const double e40 = std::abs(discrete_form_value(g, p, 40 * 2.46) - target);
  CHECK(e40 < e20 / 1.8);
  const DiscreteFormResult par = discrete_form(g, p, 40 * 2.46, BumpAlignment::parallel);
  CHECK(std::abs(par.value) < 5e-3 * std::abs(target));
  CHECK_THROWS_AS(discrete_form_value(g, p, 3 * 2.46), InvalidParameter);
}

TEST_CASE("GSFE criterion along stacking fields") {
  const MisfitSurface s = MisfitSurface::gsfe();
  const StabilityReport c = gsfe_stability(s, std::vector<Vec2>(9, Vec2(1.0 / 3, 1.0 / 3)));
  CHECK(c.verdict == Verdict::stable);
  CHECK(c.min_eig == doctest::Approx(117.0).epsilon(0.5 / 117));

  const StabilityReport id = gsfe_stability(s, stacking_field(DisplacementField::zero(240)));
  CHECK(id.min_eig < 0);
  CHECK(id.verdict == Verdict::unstable);

  const RelaxProblem prob = RelaxProblem::make(s, ElasticityTensor::make(10, 10, graphene_basis()), 0.25, 32);
  const MinimizeResult r = minimize(prob, DisplacementField::smooth_random(32, 1e-3, 0), 1e-3);
  const StabilityReport relaxed = gsfe_stability(s, stacking_field(r.u));
  const StabilityReport id32 = gsfe_stability(s, stacking_field(DisplacementField::zero(32)));
  CHECK(relaxed.positive_fraction > id32.positive_fraction);
  CHECK_THROWS_AS(gsfe_stability(MisfitSurface::lattice_sum(graphene_basis(), presets::morse_bg(), 4), {Vec2(0, 0)}),
                  InvalidParameter);
}
