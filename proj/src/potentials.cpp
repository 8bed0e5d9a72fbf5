#include "twistab/potentials.hpp"

#include <cmath>
#include <sstream>

#include "twistab/errors.hpp"
#include "twistab/quadrature.hpp"

namespace twistab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

RadialDerivatives lj_profile(double eps0, double sigma, double r) {
  const double s6 = std::pow(sigma / r, 6);
  const double s12 = s6 * s6;
  return {4 * eps0 * (s12 - s6), 4 * eps0 * (-12 * s12 + 6 * s6) / r,
          4 * eps0 * (156 * s12 - 42 * s6) / (r * r)};
}

RadialDerivatives morse_profile(double e0, double kappa, double r0, double r) {
  const double e1 = std::exp(-kappa * (r - r0));
  const double e2 = e1 * e1;
  return {e0 * (e2 - 2 * e1), e0 * (-2 * kappa * e2 + 2 * kappa * e1),
          e0 * (4 * kappa * kappa * e2 - 2 * kappa * kappa * e1)};
}

// Lift a function F(r) of the 3D distance to partials in (rho, z).
Partials lift_radial(const RadialDerivatives& f, double rho, double z) {
  const double r2 = rho * rho + z * z;
  const double r = std::sqrt(r2);
  const double g1_r = f.g1 / r;
  Partials d;
  d.w = f.g;
  d.w_rho = g1_r * rho;
  d.w_z = g1_r * z;
  d.w_rhorho = f.g2 * rho * rho / r2 + f.g1 * z * z / (r2 * r);
  d.w_zz = f.g2 * z * z / r2 + f.g1 * rho * rho / (r2 * r);
  d.w_rhoz_over_rho = (f.g2 - g1_r) * z / r2;
  d.w_rhoz = d.w_rhoz_over_rho * rho;
  d.w_rho_over_rho = g1_r;
  return d;
}

Partials add(Partials a, const Partials& b) {
  a.w += b.w;
  a.w_rho += b.w_rho;
  a.w_z += b.w_z;
  a.w_rhorho += b.w_rhorho;
  a.w_rhoz += b.w_rhoz;
  a.w_zz += b.w_zz;
  a.w_rho_over_rho += b.w_rho_over_rho;
  a.w_rhoz_over_rho += b.w_rhoz_over_rho;
  return a;
}

Partials kc_partials(const KolmogorovCrespi& k, double rho, double z) {
  // f(rho) = exp(-t) (C0 + C2 t + C4 t^2), t = (rho/delta)^2
  const double d2 = k.delta * k.delta;
  const double t = rho * rho / d2;
  const double et = std::exp(-t);
  const double f = et * (k.c0 + k.c2 * t + k.c4 * t * t);
  const double f_t = et * ((k.c2 - k.c0) + (2 * k.c4 - k.c2) * t - k.c4 * t * t);
  const double f_tt = et * ((k.c0 - 2 * k.c2 + 2 * k.c4) + (k.c2 - 4 * k.c4) * t + k.c4 * t * t);
  const double q = k.c + 2 * f;
  const double q1_over_rho = 2 * f_t * 2 / d2;
  const double q1 = q1_over_rho * rho;
  const double q2 = 2 * (f_tt * (2 * rho / d2) * (2 * rho / d2) + f_t * 2 / d2);

  const double r = std::sqrt(rho * rho + z * z);
  const double h = std::exp(-k.lambda * (r - k.z0));
  const Partials hp = lift_radial({h, -k.lambda * h, k.lambda * k.lambda * h}, rho, z);

  const double z06 = std::pow(k.z0, 6);
  const double ir = 1.0 / r;
  const double ir6 = std::pow(ir, 6);
  const Partials pp = lift_radial(
      {-k.a0 * z06 * ir6, 6 * k.a0 * z06 * ir6 * ir, -42 * k.a0 * z06 * ir6 * ir * ir}, rho, z);

  Partials d;
  d.w = hp.w * q;
  d.w_rho = hp.w_rho * q + hp.w * q1;
  d.w_z = hp.w_z * q;
  d.w_rhorho = hp.w_rhorho * q + 2 * hp.w_rho * q1 + hp.w * q2;
  d.w_zz = hp.w_zz * q;
  d.w_rhoz = hp.w_rhoz * q + hp.w_z * q1;
  d.w_rho_over_rho = hp.w_rho_over_rho * q + hp.w * q1_over_rho;
  d.w_rhoz_over_rho = hp.w_rhoz_over_rho * q + hp.w_z * q1_over_rho;
  return add(d, pp);
}

Partials product_partials(const ProductMorseLJ& k, double rho, double z) {
  const RadialDerivatives f1 = morse_profile(k.e0, k.kappa, k.r0, rho);
  const RadialDerivatives f2 = lj_profile(1.0, k.sigma, z);
  Partials d;
  d.w = f1.g * f2.g;
  d.w_rho = f1.g1 * f2.g;
  d.w_z = f1.g * f2.g1;
  d.w_rhorho = f1.g2 * f2.g;
  d.w_zz = f1.g * f2.g2;
  d.w_rhoz = f1.g1 * f2.g1;
  // The in-plane Morse factor has a kink at rho = 0; there the limit rule
  // w_rho / rho -> w_rhorho is applied instead of the (divergent) quotient.
  if (rho > 0) {
    d.w_rho_over_rho = d.w_rho / rho;
    d.w_rhoz_over_rho = d.w_rhoz / rho;
  } else {
    d.w_rho_over_rho = d.w_rhorho;
    d.w_rhoz_over_rho = f1.g2 * f2.g1;
  }
  return d;
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0; }

// Geometric panels [0, z], [z, 2z], ... up to the cutoff.
template <std::size_t N, class F>
quad::Result<N> integrate_radial(F&& f, double z, double cutoff, double abs_tol, double rel_tol) {
  quad::Result<N> total;
  total.converged = true;
  double lo = 0.0;
  double hi = std::min(std::max(z, 1.0), cutoff);
  while (lo < cutoff) {
    const auto r = quad::integrate<N>(f, lo, hi, abs_tol, rel_tol, 4000, 4);
    for (std::size_t k = 0; k < N; ++k) total.value[k] += r.value[k];
    total.error += r.error;
    total.evaluations += r.evaluations;
    total.converged = total.converged && r.converged;
    lo = hi;
    hi = std::min(2 * hi, cutoff);
  }
  return total;
}

// Smallest cutoff (doubling from 16 z) at which |h(R)| R / 6, the tail of a
// rho^-7 integrand, is below `tail_tol`.
template <class H>
double tail_cutoff(H&& h, double z, double tail_tol) {
  double r = 16.0 * std::max(z, 1.0);
  for (int i = 0; i < 40; ++i) {
    if (std::abs(h(r)) * r / 6.0 < tail_tol) return r;
    r *= 2;
  }
  throw QuadratureNotConverged("integrand does not decay fast enough for a finite cutoff");
}

}  // namespace

std::string kind_name(const PairPotential& p) {
  return std::visit(overloaded{[](const LennardJones&) { return std::string("lennard_jones"); },
                               [](const Morse&) { return std::string("morse"); },
                               [](const KolmogorovCrespi&) {
                                 return std::string("kolmogorov_crespi");
                               },
                               [](const ProductMorseLJ&) {
                                 return std::string("product_morse_lj");
                               }},
                    p.kind);
}

bool is_radial_3d(const PairPotential& p) {
  return std::holds_alternative<LennardJones>(p.kind) || std::holds_alternative<Morse>(p.kind);
}

void validate(const PairPotential& p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidParameter(what);
  };
  require(positive_finite(p.height), "interlayer height must be positive");
  std::visit(overloaded{[&](const LennardJones& k) {
                          require(std::isfinite(k.eps0), "eps0 must be finite");
                          require(positive_finite(k.sigma), "sigma must be positive");
                        },
                        [&](const Morse& k) {
                          require(std::isfinite(k.e0), "e0 must be finite");
                          require(positive_finite(k.kappa), "kappa must be positive");
                          require(positive_finite(k.r0), "r0 must be positive");
                        },
                        [&](const KolmogorovCrespi& k) {
                          require(std::isfinite(k.c) && std::isfinite(k.c0) &&
                                      std::isfinite(k.c2) && std::isfinite(k.c4) &&
                                      std::isfinite(k.a0),
                                  "KC energies must be finite");
                          require(positive_finite(k.delta), "delta must be positive");
                          require(positive_finite(k.lambda), "lambda must be positive");
                          require(positive_finite(k.z0), "z0 must be positive");
                        },
                        [&](const ProductMorseLJ& k) {
                          require(std::isfinite(k.e0), "e0 must be finite");
                          require(positive_finite(k.kappa), "kappa must be positive");
                          require(positive_finite(k.r0), "r0 must be positive");
                          require(positive_finite(k.sigma), "sigma must be positive");
                        }},
             p.kind);
}

Partials partials(const PairPotential& p, double rho, double z) {
  return std::visit(
      overloaded{
          [&](const LennardJones& k) {
            return lift_radial(lj_profile(k.eps0, k.sigma, std::hypot(rho, z)), rho, z);
          },
          [&](const Morse& k) {
            return lift_radial(morse_profile(k.e0, k.kappa, k.r0, std::hypot(rho, z)), rho, z);
          },
          [&](const KolmogorovCrespi& k) { return kc_partials(k, rho, z); },
          [&](const ProductMorseLJ& k) { return product_partials(k, rho, z); }},
      p.kind);
}

RadialDerivatives radial_value_derivs(const PairPotential& p, double rho) {
  const Partials d = partials(p, rho, p.height);
  return {d.w, d.w_rho, d.w_rhorho};
}

RadialDerivatives radial_profile(const PairPotential& p, double r) {
  if (const auto* lj = std::get_if<LennardJones>(&p.kind)) return lj_profile(lj->eps0, lj->sigma, r);
  if (const auto* m = std::get_if<Morse>(&p.kind)) return morse_profile(m->e0, m->kappa, m->r0, r);
  throw InvalidParameter(kind_name(p) + " is not a 3D-radial potential");
}

double value(const PairPotential& p, const Vec2& x, double z) { return partials(p, x.norm(), z).w; }

Mat3 hessian3d(const PairPotential& p, const Vec2& x, double z) {
  const double rho = x.norm();
  const Partials d = partials(p, rho, z);
  Mat3 h = Mat3::Zero();
  Mat2 inplane = d.w_rho_over_rho * Mat2::Identity();
  if (rho > 0) inplane += (d.w_rhorho - d.w_rho_over_rho) * (x * x.transpose()) / (rho * rho);
  h.topLeftCorner<2, 2>() = inplane;
  h(1, 0) = h(0, 1);
  const Vec2 cross = d.w_rhoz_over_rho * x;
  h(0, 2) = h(2, 0) = cross(0);
  h(1, 2) = h(2, 1) = cross(1);
  h(2, 2) = d.w_zz;
  return h;
}

Vec2 inplane_gradient(const PairPotential& p, const Vec2& x, double z) {
  return partials(p, x.norm(), z).w_rho_over_rho * x;
}

Mat2 inplane_hessian(const PairPotential& p, const Vec2& x, double z) {
  return hessian3d(p, x, z).topLeftCorner<2, 2>();
}

double m_closed(const PairPotential& p, double z) {
  const double az = std::abs(z);
  return std::visit(
      overloaded{
          [&](const LennardJones& k) {
            const double s6 = std::pow(k.sigma / az, 6);
            return 8 * kPi * k.eps0 * (5 * s6 - 11 * s6 * s6);
          },
          [&](const Morse& k) {
            return -4 * kPi * k.e0 *
                   ((k.kappa * az - 1) * std::exp(-2 * k.kappa * (az - k.r0)) -
                    (k.kappa * az - 2) * std::exp(-k.kappa * (az - k.r0)));
          },
          [&](const KolmogorovCrespi&) -> double {
            throw NoClosedForm("no closed form for m(z) with the Kolmogorov-Crespi potential");
          },
          [&](const ProductMorseLJ& k) {
            const double s6 = std::pow(k.sigma / az, 6);
            return 3 * kPi * k.e0 / (k.kappa * k.kappa * az * az) *
                   (std::exp(2 * k.kappa * k.r0) - 8 * std::exp(k.kappa * k.r0)) *
                   (-7 * s6 + 26 * s6 * s6);
          }},
      p.kind);
}

MzQuadrature m_quadrature_detailed(const PairPotential& p, double z) {
  if (!(z > 0)) throw InvalidParameter("m(z) requires z > 0");
  auto integrand = [&](double rho) { return 2 * kPi * rho * partials(p, rho, z).w_zz; };
  // Rough magnitude from the first panel sets the absolute tolerances.
  const double scale =
      std::abs(quad::integrate_scalar(integrand, 0.0, 4 * z, 0.0, 1e-6, 200, 4).value[0]);
  const double tol = std::max(1e-6 * scale, 1e-9);
  const double cutoff = tail_cutoff(integrand, z, 1e-3 * tol);
  const auto r = integrate_radial<1>([&](double rho) { return quad::Values<1>{integrand(rho)}; },
                                     z, cutoff, 1e-4 * tol, 1e-12);
  const double err = r.error + std::abs(integrand(cutoff)) * cutoff / 6.0;
  if (!r.converged || err > std::max(1e-6 * std::abs(r.value[0]), 1e-9)) {
    std::ostringstream os;
    os << "m(z) quadrature stalled at z=" << z << " (error estimate " << err << ")";
    throw QuadratureNotConverged(os.str());
  }
  return {r.value[0], err, cutoff};
}

double m_quadrature(const PairPotential& p, double z) { return m_quadrature_detailed(p, z).value; }

MzQuadrature inplane_average(const PairPotential& p, double z) {
  if (!(z > 0)) throw InvalidParameter("in-plane average requires z > 0");
  auto integrand = [&](double rho) {
    const Partials d = partials(p, rho, z);
    return kPi * (rho * d.w_rhorho + d.w_rho);
  };
  auto magnitude = [&](double rho) {
    const Partials d = partials(p, rho, z);
    return kPi * (std::abs(rho * d.w_rhorho) + std::abs(d.w_rho));
  };
  const double scale =
      quad::integrate_scalar(magnitude, 0.0, 4 * z, 0.0, 1e-6, 200, 4).value[0];
  const double tol = std::max(1e-6 * scale, 1e-9);
  const double cutoff = tail_cutoff(magnitude, z, 1e-3 * tol);
  const auto r = integrate_radial<1>([&](double rho) { return quad::Values<1>{integrand(rho)}; },
                                     z, cutoff, 1e-4 * tol, 1e-12);
  if (!r.converged) throw QuadratureNotConverged("in-plane average quadrature stalled");
  return {r.value[0], r.error + magnitude(cutoff) * cutoff / 6.0, cutoff};
}

MzComparison compare_mz(const PairPotential& p, double z) {
  MzComparison c;
  c.z = z;
  if (!std::holds_alternative<KolmogorovCrespi>(p.kind)) c.closed = m_closed(p, z);
  const MzQuadrature q = m_quadrature_detailed(p, z);
  c.quadrature = q.value;
  c.quadrature_error = q.error;
  if (is_radial_3d(p)) {
    const RadialDerivatives g = radial_profile(p, z);
    c.identity = -2 * kPi * (z * g.g1 + g.g);
    c.printed_general = 2 * kPi * (z * g.g1 + 2 * g.g);
  }
  if (const auto* k = std::get_if<ProductMorseLJ>(&p.kind)) {
    const double moment = k->e0 / (4 * k->kappa * k->kappa) *
                          (std::exp(2 * k->kappa * k->r0) - 8 * std::exp(k->kappa * k->r0));
    c.product_derived = 2 * kPi * moment * lj_profile(1.0, k->sigma, z).g2;
  }
  return c;
}

std::vector<double> sign_transition(const PairPotential& p, double lo, double hi, MzMethod method,
                                    int scan_points) {
  if (!(lo > 0) || !(hi > lo)) throw InvalidParameter("sign_transition needs 0 < lo < hi");
  auto m = [&](double z) {
    return method == MzMethod::closed ? m_closed(p, z) : m_quadrature(p, z);
  };
  std::vector<double> roots;
  const int n = std::max(2, scan_points);
  double z_prev = lo;
  double m_prev = m(lo);
  for (int i = 1; i < n; ++i) {
    const double z = lo + (hi - lo) * i / (n - 1);
    const double mz = m(z);
    if (m_prev == 0.0) {
      roots.push_back(z_prev);
    } else if (mz != 0.0 && std::signbit(mz) != std::signbit(m_prev)) {
      double a = z_prev, b = z, fa = m_prev;
      while (b - a > 1e-12 * b) {
        const double c = 0.5 * (a + b);
        const double fc = m(c);
        if (fc == 0.0) {
          a = b = c;
          break;
        }
        if (std::signbit(fc) == std::signbit(fa)) {
          a = c;
          fa = fc;
        } else {
          b = c;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    z_prev = z;
    m_prev = mz;
  }
  if (m_prev == 0.0) roots.push_back(z_prev);
  if (roots.empty()) {
    std::ostringstream os;
    os << "m(z) has no sign change in [" << lo << ", " << hi << "]";
    throw NoRootInBracket(os.str());
  }
  return roots;
}

double hessian_tail_bound(const PairPotential& p, double z, double r_cut) {
  auto norm_bound = [&](double rho) {
    const Partials d = partials(p, rho, z);
    return std::abs(d.w_rhorho) + std::abs(d.w_rho_over_rho) + std::abs(d.w_zz) +
           2 * std::abs(d.w_rhoz);
  };
  auto integrand = [&](double rho) { return 2 * kPi * rho * norm_bound(rho); };
  const double far = 16 * r_cut;
  const auto r = quad::integrate_scalar(integrand, r_cut, far, 1e-300, 1e-6, 2000, 8);
  // rho^-8 decay beyond `far`
  return r.value[0] + r.error + integrand(far) * far / 6.0;
}

namespace presets {

PairPotential lennard_jones_bg(double height) { return {LennardJones{2.39, 3.41}, height}; }

PairPotential morse_bg(double height) { return {Morse{2.8437, 1.8168, 3.6891}, height}; }

PairPotential kolmogorov_crespi_bg(double height) {
  return {KolmogorovCrespi{3.030, 15.71, 12.29, 4.933, 0.578, 3.629, 10.238, 3.34}, height};
}

PairPotential product_morse_lj_bg(double height) {
  return {ProductMorseLJ{2.8437, 1.8168, 3.6891, 3.41}, height};
}

}  // namespace presets

}  // namespace twistab
