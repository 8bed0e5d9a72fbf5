#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "twistab/types.hpp"

namespace twistab {

// Energies in meV, lengths in Angstrom.

struct LennardJones {
  double eps0;
  double sigma;
};

struct Morse {
  double e0;
  double kappa;
  double r0;
};

/// Kolmogorov-Crespi with both normals fixed to e_z, so rho is the in-plane
/// distance and r = sqrt(rho^2 + z^2).
struct KolmogorovCrespi {
  double c, c0, c2, c4;
  double delta;
  double lambda;
  double a0;
  double z0;
};

/// Morse in the in-plane distance times a unit-depth Lennard-Jones in z.
struct ProductMorseLJ {
  double e0;
  double kappa;
  double r0;
  double sigma;
};

using PotentialKind = std::variant<LennardJones, Morse, KolmogorovCrespi, ProductMorseLJ>;

struct PairPotential {
  PotentialKind kind;
  double height = 3.35;  // interlayer distance d for 2D restrictions
};

/// "lennard_jones" | "morse" | "kolmogorov_crespi" | "product_morse_lj"
std::string kind_name(const PairPotential& p);

/// True for potentials of the form g(sqrt(rho^2 + z^2)).
bool is_radial_3d(const PairPotential& p);

/// Throws InvalidParameter for non-positive lengths or non-finite values.
void validate(const PairPotential& p);

struct RadialDerivatives {
  double g = 0, g1 = 0, g2 = 0;
};

/// Partial derivatives of w(rho, z) where v(x, z) = w(|x|, z). The two
/// `_over_rho` entries are evaluated analytically so they stay finite at rho=0.
struct Partials {
  double w = 0;
  double w_rho = 0, w_z = 0;
  double w_rhorho = 0, w_rhoz = 0, w_zz = 0;
  double w_rho_over_rho = 0;
  double w_rhoz_over_rho = 0;
};

Partials partials(const PairPotential& p, double rho, double z);

/// Value and radial derivatives of the restriction rho -> w(rho, p.height).
RadialDerivatives radial_value_derivs(const PairPotential& p, double rho);

/// Profile g(r) of a 3D-radial potential with its first two derivatives.
/// Throws InvalidParameter for potentials that are not 3D-radial.
RadialDerivatives radial_profile(const PairPotential& p, double r);

double value(const PairPotential& p, const Vec2& x, double z);

/// Full 3x3 Hessian of v at (x, z), ordered (x1, x2, z).
Mat3 hessian3d(const PairPotential& p, const Vec2& x, double z);

/// In-plane gradient and Hessian of x -> v(x, z).
Vec2 inplane_gradient(const PairPotential& p, const Vec2& x, double z);
Mat2 inplane_hessian(const PairPotential& p, const Vec2& x, double z);

/// Per-family closed forms for the plane-integrated vertical curvature, as
/// printed with the worked examples. Throws NoClosedForm for KC.
double m_closed(const PairPotential& p, double z);

struct MzQuadrature {
  double value = 0;
  double error = 0;
  double cutoff = 0;
};

/// m(z) = 2 pi int_0^inf rho d_z^2 w(rho, z) d rho by adaptive quadrature with a
/// tail-bounded cutoff. Throws QuadratureNotConverged.
MzQuadrature m_quadrature_detailed(const PairPotential& p, double z);
double m_quadrature(const PairPotential& p, double z);

/// Diagonal entry of the in-plane block of int D^2 v dx, i.e.
/// pi int_0^inf (rho w_rhorho + w_rho) d rho. Vanishes for decaying potentials.
MzQuadrature inplane_average(const PairPotential& p, double z);

/// Side-by-side values of the different m(z) expressions at one height.
struct MzComparison {
  double z = 0;
  std::optional<double> closed;           // per-example printed form
  double quadrature = 0;                  // ground truth
  double quadrature_error = 0;
  std::optional<double> identity;         // -2 pi (z g'(z) + g(z)), 3D-radial only
  std::optional<double> printed_general;  // 2 pi (z g'(z) + 2 g(z)), 3D-radial only
  std::optional<double> product_derived;  // 12 pi prefactor moment form, product only
};

MzComparison compare_mz(const PairPotential& p, double z);

enum class MzMethod { closed, quadrature };

/// Sign changes of m on [lo, hi]: 2000-point scan, then bisection to 1e-12
/// relative. Throws NoRootInBracket if none is found.
std::vector<double> sign_transition(const PairPotential& p, double lo, double hi, MzMethod method,
                                    int scan_points = 2000);

/// Upper estimate of int_{|x| > r_cut} |D^2 v(x, z)| dx (spectral norm bound).
double hessian_tail_bound(const PairPotential& p, double z, double r_cut);

namespace presets {

inline constexpr double kGrapheneSpacing = 3.35;

PairPotential lennard_jones_bg(double height = kGrapheneSpacing);
PairPotential morse_bg(double height = kGrapheneSpacing);
PairPotential kolmogorov_crespi_bg(double height = kGrapheneSpacing);
PairPotential product_morse_lj_bg(double height = kGrapheneSpacing);

}  // namespace presets

}  // namespace twistab
