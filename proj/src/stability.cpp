#include "twistab/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "twistab/errors.hpp"
#include "twistab/parallel.hpp"
#include "twistab/quadrature.hpp"

namespace twistab {

namespace {

double smallest_singular(const Mat2& a) {
  Eigen::JacobiSVD<Mat2> svd(a);
  return svd.singularValues()(1);
}

double cell_diameter(const Mat2& a) {
  return std::max((a.col(0) + a.col(1)).norm(), (a.col(0) - a.col(1)).norm());
}

// Lattice points a*n with |a*n - center| <= radius, ordered by (n1, n2).
std::vector<Vec2> points_in_disk(const Mat2& a, const Vec2& center, double radius) {
  const Vec2 c = a.inverse() * center;
  const int half = static_cast<int>(std::ceil(radius / smallest_singular(a))) + 1;
  const int c1 = static_cast<int>(std::lround(c(0)));
  const int c2 = static_cast<int>(std::lround(c(1)));
  std::vector<Vec2> out;
  for (int n1 = c1 - half; n1 <= c1 + half; ++n1)
    for (int n2 = c2 - half; n2 <= c2 + half; ++n2) {
      const Vec2 r = a * Vec2(n1, n2);
      if ((r - center).norm() <= radius) out.push_back(r);
    }
  return out;
}

struct Eig3 {
  double min;
  Vec3 dir;
};

Eig3 min_eig3(const Mat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (m + m.transpose()));
  Vec3 v = es.eigenvectors().col(0);
  // fix the sign so the largest component is positive
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v(k) < 0) v = -v;
  return {es.eigenvalues()(0), v};
}

StabilityReport sum_report(const BilayerGeometry& g, const PairPotential& p, const DifferenceField& ueq,
                           const std::vector<Vec2>& points, double cutoff, double tol_eig,
                           double tail_tol) {
  if (points.empty()) throw InvalidParameter("no stability sample points");
  if (!(tol_eig >= 0)) throw InvalidParameter("tol_eig must be non-negative");
  if (stability_tail_bound(g, p, cutoff, ueq.shift_bound()) > tail_tol) {
    std::ostringstream os;
    os << "cutoff " << cutoff << " A leaves a Hessian tail above " << tail_tol;
    throw CutoffTooSmall(os.str());
  }
  std::vector<Eig3> eig(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    eig[i] = min_eig3(stability_matrix(g, p, ueq, points[i], cutoff, tail_tol));
  });
  StabilityReport rep;
  rep.criterion = Criterion::stable_sum;
  rep.tol_eig = tol_eig;
  rep.cutoff = cutoff;
  rep.n_samples = static_cast<int>(points.size());
  std::size_t worst = 0, positive = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    rep.samples.push_back({points[i], eig[i].min});
    if (eig[i].min < eig[worst].min) worst = i;
    if (eig[i].min > 0) ++positive;
  }
  rep.min_eig = eig[worst].min;
  rep.worst_direction = eig[worst].dir;
  rep.positive_fraction = double(positive) / double(points.size());
  rep.verdict = rep.min_eig >= -tol_eig ? Verdict::stable : Verdict::inconclusive;
  return rep;
}

}  // namespace

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::stable_sum: return "StableSum";
    case Criterion::instability_integral: return "InstabilityIntegral";
    case Criterion::discrete_ansatz: return "DiscreteAnsatz";
    case Criterion::gsfe_well: return "GsfeWell";
  }
  return "unknown";
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

DifferenceField DifferenceField::zero() { return {}; }

DifferenceField DifferenceField::homobilayer(const BilayerGeometry& g, const Mat2& a,
                                             const DisplacementField& u, double drop_tol) {
  auto interp = std::make_shared<TrigInterpolant>(u, drop_tol);
  const Mat2 inv1 = g.a1.inverse(), inv2 = g.a2.inverse();
  double peak = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) peak = std::max(peak, std::hypot(u.u1[k], u.u2[k]));
  DifferenceField f;
  f.fn_ = [interp, inv1, inv2, a](const Vec2& x) -> Vec2 {
    return -a * ((*interp)(inv1 * x) + (*interp)(inv2 * x));
  };
  // interpolant overshoot between nodes is covered by the factor 2
  f.bound_ = 2.0 * 2.0 * a.norm() * peak;
  return f;
}

DifferenceField DifferenceField::custom(Fn fn, double shift_bound) {
  if (!(shift_bound >= 0)) throw InvalidParameter("shift bound must be non-negative");
  DifferenceField f;
  f.fn_ = std::move(fn);
  f.bound_ = shift_bound;
  return f;
}

double stability_tail_bound(const BilayerGeometry& g, const PairPotential& p, double cutoff,
                            double shift_bound) {
  const double margin = cell_diameter(g.a1) + shift_bound;
  const double r_in = cutoff - margin;
  if (r_in <= p.height) return std::numeric_limits<double>::infinity();
  return hessian_tail_bound(p, p.height, r_in) / g.cell_area1;
}

double required_cutoff(const BilayerGeometry& g, const PairPotential& p, double tail_tol,
                       double shift_bound) {
  if (!(tail_tol > 0)) throw InvalidParameter("tail tolerance must be positive");
  double r = 10.0;
  for (int i = 0; i < 200; ++i) {
    if (stability_tail_bound(g, p, r, shift_bound) <= tail_tol) return r;
    r *= 1.25;
  }
  throw CutoffTooSmall("no finite cutoff meets the requested tail tolerance");
}

Mat3 stability_matrix(const BilayerGeometry& g, const PairPotential& p, const DifferenceField& ueq,
                      const Vec2& x, double cutoff, double tail_tol) {
  const double tail = stability_tail_bound(g, p, cutoff, ueq.shift_bound());
  if (tail > tail_tol) {
    std::ostringstream os;
    os << "cutoff " << cutoff << " A leaves a Hessian tail estimate " << tail << " above " << tail_tol;
    throw CutoffTooSmall(os.str());
  }
  Mat3 sum = Mat3::Zero();
  for (const Vec2& r : points_in_disk(g.a1, x, cutoff)) {
    const Vec2 off = x - r;
    sum += hessian3d(p, off + ueq(off), p.height);
  }
  return 0.5 * (sum + sum.transpose());
}

StabilityReport stability_report(const BilayerGeometry& g, const PairPotential& p, const DifferenceField& ueq,
                                 int grid_res, double cutoff, double tol_eig, double tail_tol) {
  if (grid_res < 4) throw InvalidParameter("stability grid_res must be at least 4");
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(grid_res) * grid_res);
  for (int i = 0; i < grid_res; ++i)
    for (int j = 0; j < grid_res; ++j) pts.push_back(g.a1 * Vec2(double(i) / grid_res, double(j) / grid_res));
  return sum_report(g, p, ueq, pts, cutoff, tol_eig, tail_tol);
}

StabilityReport stability_report_at(const BilayerGeometry& g, const PairPotential& p,
                                    const DifferenceField& ueq, const std::vector<Vec2>& points,
                                    double cutoff, double tol_eig, double tail_tol) {
  return sum_report(g, p, ueq, points, cutoff, tol_eig, tail_tol);
}

InstabilityResult instability_matrix(const BilayerGeometry&, const PairPotential& p,
                                     const DifferenceField& ueq, double quad_tol, double tol_eig) {
  if (!(quad_tol > 0)) throw InvalidParameter("quadrature tolerance must be positive");
  const double d = p.height;
  const MzQuadrature mz = m_quadrature_detailed(p, d);
  const double scale = std::max(std::abs(mz.value), 1e-9);
  const double cutoff = mz.cutoff + ueq.shift_bound();
  const double abs_tol = quad_tol * scale;

  // components: xx, xy, yy, xz, yz, zz
  auto integrand = [&](double r, double phi) {
    const Vec2 x(r * std::cos(phi), r * std::sin(phi));
    const Mat3 h = hessian3d(p, x + ueq(x), d);
    return quad::Values<6>{r * h(0, 0), r * h(0, 1), r * h(1, 1), r * h(0, 2), r * h(1, 2), r * h(2, 2)};
  };
  quad::Values<6> total{};
  double err = 0.0;
  bool ok = true;
  const double first = std::min(std::max(d, 1.0), cutoff);
  const int panels = 1 + std::max(0, static_cast<int>(std::ceil(std::log2(cutoff / first))));
  double lo = 0.0, hi = first;
  while (lo < cutoff) {
    const auto r = quad::integrate_2d<6>(integrand, lo, hi, 0.0, 2 * kPi, abs_tol / panels, 1e-12, 2000, 2, 4);
    for (int k = 0; k < 6; ++k) total[k] += r.value[k];
    err += r.error;
    ok = ok && r.converged;
    lo = hi;
    hi = std::min(2 * hi, cutoff);
  }
  err += mz.error;  // tail estimate beyond the cutoff
  if (!ok || err > 10 * abs_tol) {
    std::ostringstream os;
    os << "instability quadrature did not converge (error estimate " << err << ")";
    throw QuadratureNotConverged(os.str());
  }
  InstabilityResult out;
  out.matrix << total[0], total[1], total[3], total[1], total[2], total[4], total[3], total[4], total[5];
  out.error = err;
  out.cutoff = cutoff;
  const Eig3 e = min_eig3(out.matrix);
  StabilityReport& rep = out.report;
  rep.criterion = Criterion::instability_integral;
  rep.tol_eig = tol_eig;
  rep.min_eig = e.min;
  rep.worst_direction = e.dir;
  rep.samples.push_back({Vec2::Zero(), e.min});
  rep.cutoff = cutoff;
  rep.quad_err = err;
  rep.n_samples = 1;
  rep.positive_fraction = e.min > 0 ? 1.0 : 0.0;
  rep.verdict = e.min < -tol_eig ? Verdict::unstable : Verdict::inconclusive;
  return out;
}

double bump_profile(double rho, double r, double width) {
  if (rho <= r) return 1.0;
  if (rho >= r + width) return 0.0;
  const double t = (rho - r) / width;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

DiscreteFormResult discrete_form(const BilayerGeometry& g, const PairPotential& p, double r_bump,
                                 BumpAlignment align, double interaction_rel_tol) {
  const double width = std::max({g.a1.col(0).norm(), g.a1.col(1).norm(), g.a2.col(0).norm(),
                                 g.a2.col(1).norm()});
  if (!(r_bump >= 5 * width)) throw InvalidParameter("bump radius must be at least 5 lattice constants");
  const double d = p.height;
  const double m = std::abs(m_quadrature(p, d));
  const double area = std::min(g.cell_area1, g.cell_area2);
  double r_int = 2 * d;
  while (hessian_tail_bound(p, d, r_int) / area > interaction_rel_tol * std::max(m / area, 1e-12)) {
    r_int *= 1.25;
    if (r_int > 1e6) throw CutoffTooSmall("interaction cutoff search did not terminate");
  }
  const double c1 = std::sqrt(g.cell_area1 / (2 * kPi)) / r_bump;
  const double c2 = (align == BumpAlignment::antiparallel ? 1.0 : -1.0) * std::sqrt(g.cell_area2 / (2 * kPi)) / r_bump;
  const double support = r_bump + width;
  // every pair with a nonzero amplitude has R1 within support + r_int
  const std::vector<Vec2> layer1 = points_in_disk(g.a1, Vec2::Zero(), support + r_int);
  std::vector<double> partial(layer1.size(), 0.0);
  std::vector<long long> counts(layer1.size(), 0);
  parallel_for(layer1.size(), [&](std::size_t i) {
    const Vec2& r1 = layer1[i];
    const double a1 = c1 * bump_profile(r1.norm(), r_bump, width);
    double acc = 0.0;
    long long cnt = 0;
    for (const Vec2& r2 : points_in_disk(g.a2, r1, r_int)) {
      const double a2 = c2 * bump_profile(r2.norm(), r_bump, width);
      const double amp = a1 + a2;
      if (amp == 0.0) continue;
      acc += amp * amp * partials(p, (r1 - r2).norm(), d).w_zz;
      ++cnt;
    }
    partial[i] = acc;
    counts[i] = cnt;
  });
  DiscreteFormResult out;
  out.value = pairwise_sum(partial.data(), partial.size());
  out.interaction_cutoff = r_int;
  for (long long c : counts) out.pair_count += c;
  return out;
}

double discrete_form_value(const BilayerGeometry& g, const PairPotential& p, double r_bump) {
  return discrete_form(g, p, r_bump).value;
}

double ansatz_prefactor_printed(const BilayerGeometry& g) {
  const double s = std::sqrt(g.cell_area1) + std::sqrt(g.cell_area2);
  return s * s / (2 * kPi * g.cell_area1 / g.cell_area2);
}

double ansatz_prefactor_derived(const BilayerGeometry& g) {
  const double s = std::sqrt(g.cell_area1) + std::sqrt(g.cell_area2);
  return s * s / (2 * g.cell_area1 * g.cell_area2);
}

StabilityReport gsfe_stability(const MisfitSurface& s, const std::vector<Vec2>& stacking, double tol_eig) {
  if (!s.is_gsfe()) throw InvalidParameter("gsfe_stability requires a GSFE misfit surface");
  if (stacking.empty()) throw InvalidParameter("empty stacking field");
  StabilityReport rep;
  rep.criterion = Criterion::gsfe_well;
  rep.tol_eig = tol_eig;
  rep.n_samples = static_cast<int>(stacking.size());
  std::vector<double> eig(stacking.size());
  std::vector<Vec2> dir(stacking.size());
  parallel_for(stacking.size(), [&](std::size_t i) {
    const Mat2 h = misfit_grad_hessian(s, stacking[i]).hess;
    Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (h + h.transpose()));
    eig[i] = es.eigenvalues()(0);
    dir[i] = es.eigenvectors().col(0);
  });
  std::size_t worst = 0, positive = 0;
  for (std::size_t i = 0; i < stacking.size(); ++i) {
    rep.samples.push_back({stacking[i], eig[i]});
    if (eig[i] < eig[worst]) worst = i;
    if (eig[i] > 0) ++positive;
  }
  rep.min_eig = eig[worst];
  Vec2 w = dir[worst];
  Eigen::Index k = 0;
  w.cwiseAbs().maxCoeff(&k);
  if (w(k) < 0) w = -w;
  rep.worst_direction = Vec3(w(0), w(1), 0.0);
  rep.positive_fraction = double(positive) / double(stacking.size());
  rep.verdict = rep.min_eig >= -tol_eig ? Verdict::stable : Verdict::unstable;
  return rep;
}

}  // namespace twistab
