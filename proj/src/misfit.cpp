#include "twistab/misfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "twistab/errors.hpp"
#include "twistab/parallel.hpp"

namespace twistab {

namespace {

struct Mode {
  double coef;
  int alpha, beta;
};

std::array<Mode, 9> gsfe_modes(const GsfeSource& c) {
  return {{{c.c1, 1, 0}, {c.c1, 0, 1}, {c.c1, 1, 1},
           {c.c2, 1, 2}, {c.c2, 1, -1}, {c.c2, 2, 1},
           {c.c3, 2, 0}, {c.c3, 0, 2}, {c.c3, 2, 2}}};
}

// Centered representative keeps the truncation window symmetric about the
// evaluation point, which makes the truncated sum exactly Z^2-periodic and even.
Vec2 centered(const Vec2& y) { return Vec2(y(0) - std::round(y(0)), y(1) - std::round(y(1))); }

double gsfe_value(const GsfeSource& c, const Vec2& y) {
  const double v = 2 * kPi * y(0), w = 2 * kPi * y(1);
  double s = c.c0;
  for (const Mode& m : gsfe_modes(c)) s += m.coef * std::cos(m.alpha * v + m.beta * w);
  return s;
}

GradHessian gsfe_grad_hessian(const GsfeSource& c, const Vec2& y) {
  const double v = 2 * kPi * y(0), w = 2 * kPi * y(1);
  GradHessian out{Vec2::Zero(), Mat2::Zero()};
  for (const Mode& m : gsfe_modes(c)) {
    const double phase = m.alpha * v + m.beta * w;
    const Vec2 k(m.alpha, m.beta);
    out.grad -= m.coef * std::sin(phase) * k;
    out.hess -= m.coef * std::cos(phase) * (k * k.transpose());
  }
  out.grad *= 2 * kPi;
  out.hess *= 4 * kPi * kPi;
  return out;
}

double lattice_value(const LatticeSumSource& s, const Vec2& y) {
  const Vec2 yc = centered(y);
  const double inv_area = 1.0 / std::abs(s.a.determinant());
  const double d = s.potential.height;
  double sum = 0.0;
  for (int n1 = -s.n_trunc; n1 <= s.n_trunc; ++n1) {
    for (int n2 = -s.n_trunc; n2 <= s.n_trunc; ++n2) {
      const Vec2 x = s.a * (yc - Vec2(n1, n2));
      sum += partials(s.potential, x.norm(), d).w;
    }
  }
  return sum * inv_area;
}

GradHessian lattice_grad_hessian(const LatticeSumSource& s, const Vec2& y) {
  const Vec2 yc = centered(y);
  const double d = s.potential.height;
  Vec2 g = Vec2::Zero();
  Mat2 h = Mat2::Zero();
  for (int n1 = -s.n_trunc; n1 <= s.n_trunc; ++n1) {
    for (int n2 = -s.n_trunc; n2 <= s.n_trunc; ++n2) {
      const Vec2 x = s.a * (yc - Vec2(n1, n2));
      const double rho = x.norm();
      const Partials p = partials(s.potential, rho, d);
      g += p.w_rho_over_rho * x;
      Mat2 hx = p.w_rho_over_rho * Mat2::Identity();
      if (rho > 0) hx += (p.w_rhorho - p.w_rho_over_rho) * (x * x.transpose()) / (rho * rho);
      h += hx;
    }
  }
  const double inv_area = 1.0 / std::abs(s.a.determinant());
  return {s.a.transpose() * g * inv_area, s.a.transpose() * h * s.a * inv_area};
}

double window_tail_bound(const Mat2& a, const PairPotential& p, int n) {
  const double area = std::abs(a.determinant());
  const double line_spacing = area / std::max(a.col(0).norm(), a.col(1).norm());
  const double r_in = (n + 0.5) * line_spacing;
  const double a_norm = a.norm();  // Frobenius >= spectral
  return a_norm * a_norm / (area * area) * hessian_tail_bound(p, p.height, r_in);
}

}  // namespace

MisfitSurface MisfitSurface::gsfe(GsfeSource c) {
  MisfitSurface s;
  s.source = c;
  return s;
}

MisfitSurface MisfitSurface::lattice_sum(const Mat2& a, const PairPotential& p, int n_trunc) {
  if (n_trunc < 1) throw InvalidParameter("n_trunc must be at least 1");
  if (std::abs(a.determinant()) == 0.0) throw InvalidParameter("lattice basis is singular");
  validate(p);
  MisfitSurface s;
  s.source = LatticeSumSource{a, p, n_trunc};
  return s;
}

std::string MisfitSurface::tag() const {
  if (const auto* l = std::get_if<LatticeSumSource>(&source)) {
    std::ostringstream os;
    os << "lattice_sum:" << kind_name(l->potential) << ":N=" << l->n_trunc;
    return os.str();
  }
  return "gsfe";
}

double misfit_value(const MisfitSurface& s, const Vec2& x) {
  if (const auto* g = std::get_if<GsfeSource>(&s.source)) return gsfe_value(*g, x);
  return lattice_value(std::get<LatticeSumSource>(s.source), x);
}

GradHessian misfit_grad_hessian(const MisfitSurface& s, const Vec2& x) {
  if (const auto* g = std::get_if<GsfeSource>(&s.source)) return gsfe_grad_hessian(*g, x);
  return lattice_grad_hessian(std::get<LatticeSumSource>(s.source), x);
}

double min_eigenvalue(const Mat2& m) {
  const double a = m(0, 0), d = m(1, 1), b = 0.5 * (m(0, 1) + m(1, 0));
  const double mean = 0.5 * (a + d);
  return mean - std::hypot(0.5 * (a - d), b);
}

Vec2 locate_well(const MisfitSurface& s, const Vec2& guess, int max_iter) {
  Vec2 x = guess;
  for (int it = 0; it < max_iter; ++it) {
    const GradHessian gh = misfit_grad_hessian(s, x);
    const Vec2 step = gh.hess.partialPivLu().solve(gh.grad);
    x -= step;
    if (step.norm() < 1e-14) break;
  }
  return x;
}

WellReport well_report(const Mat2& a, const PairPotential& p, const std::vector<int>& n_list) {
  if (n_list.empty()) throw InvalidParameter("n_list must be nonempty");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw InvalidParameter("n_list must be increasing");
  WellReport rep;
  rep.rows.resize(n_list.size());
  parallel_for(n_list.size(), [&](std::size_t i) {
    const MisfitSurface s = MisfitSurface::lattice_sum(a, p, n_list[i]);
    WellRow& row = rep.rows[i];
    row.n = n_list[i];
    row.min_eig_ab = min_eigenvalue(misfit_grad_hessian(s, s.wells[0]).hess);
    row.min_eig_ba = min_eigenvalue(misfit_grad_hessian(s, s.wells[1]).hess);
    row.tail_bound = window_tail_bound(a, p, n_list[i]);
  });
  const WellRow& last = rep.rows.back();
  rep.stable = last.min_eig_ab > 0 && last.min_eig_ba > 0;
  rep.cauchy = true;
  double prev_diff = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const double diff = std::abs(rep.rows[i].min_eig_ab - rep.rows[i - 1].min_eig_ab);
    const double floor = 1e-12 * std::abs(rep.rows[i].min_eig_ab);
    if (diff > prev_diff && diff > floor) rep.cauchy = false;
    prev_diff = std::max(diff, floor);
  }
  return rep;
}

WellReport well_report(const MisfitSurface& s) {
  WellReport rep;
  WellRow row;
  row.n = 0;
  row.min_eig_ab = min_eigenvalue(misfit_grad_hessian(s, s.wells[0]).hess);
  row.min_eig_ba = min_eigenvalue(misfit_grad_hessian(s, s.wells[1]).hess);
  if (const auto* l = std::get_if<LatticeSumSource>(&s.source)) {
    row.n = l->n_trunc;
    row.tail_bound = window_tail_bound(l->a, l->potential, l->n_trunc);
  }
  rep.rows.push_back(row);
  rep.stable = row.min_eig_ab > 0 && row.min_eig_ba > 0;
  rep.cauchy = true;
  return rep;
}

std::vector<double> surface_grid(const MisfitSurface& s, int res) {
  if (res < 2) throw InvalidParameter("surface grid resolution must be at least 2");
  std::vector<double> out(static_cast<std::size_t>(res) * res);
  parallel_for(static_cast<std::size_t>(res), [&](std::size_t i) {
    for (int j = 0; j < res; ++j)
      out[i * res + j] = misfit_value(s, Vec2(double(i) / res, double(j) / res));
  });
  return out;
}

}  // namespace twistab
