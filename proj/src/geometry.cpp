#include "twistab/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "twistab/errors.hpp"

namespace twistab {

namespace {

double condition_number(const Mat2& m) {
  Eigen::JacobiSVD<Mat2> svd(m);
  const auto s = svd.singularValues();
  if (s(0) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(1);
}

// Snap coordinates that sit within rounding of an integer, then reduce to [0,1).
double half_open_frac(double t) {
  const double r = std::round(t);
  if (std::abs(t - r) < 1e-12) t = r;
  double f = t - std::floor(t);
  if (f >= 1.0) f = 0.0;
  return f;
}

}  // namespace

Mat2 rotation(double phi) {
  Mat2 r;
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return r;
}

Mat2 graphene_basis(double lattice_constant) {
  if (!(lattice_constant > 0.0)) throw InvalidParameter("lattice constant must be positive");
  const double s3 = std::sqrt(3.0) / 2.0;
  Mat2 a;
  a << s3, s3, -0.5, 0.5;
  return lattice_constant * a;
}

BilayerGeometry build_bilayer(const Mat2& a1, const Mat2& a2, double theta) {
  if (std::abs(a1.determinant()) == 0.0 || std::abs(a2.determinant()) == 0.0)
    throw InvalidParameter("layer basis is singular");
  BilayerGeometry g;
  g.a1 = a1;
  g.a2 = a2;
  g.theta = theta;
  const Mat2 diff = a1.inverse() - a2.inverse();
  const double cond = condition_number(diff);
  const double scale = std::max(a1.inverse().norm(), a2.inverse().norm());
  if (!(cond <= 1e12) || diff.norm() <= 1e-12 * scale) {
    std::ostringstream os;
    os << "moire basis is singular at working precision (condition number " << cond << ")";
    throw SingularMoire(os.str());
  }
  g.a_moire = diff.inverse();
  g.b1 = 2.0 * kPi * a1.inverse().transpose();
  g.b2 = 2.0 * kPi * a2.inverse().transpose();
  g.b_moire = g.b1 - g.b2;
  g.d12 = Mat2::Identity() - a2 * a1.inverse();
  g.d21 = Mat2::Identity() - a1 * a2.inverse();
  g.cell_area1 = std::abs(a1.determinant());
  g.cell_area2 = std::abs(a2.determinant());
  g.cell_area_moire = std::abs(g.a_moire.determinant());
  return g;
}

BilayerGeometry build_twisted_pair(const Mat2& a, double theta) {
  return build_bilayer(rotation(theta / 2) * a, rotation(-theta / 2) * a, theta);
}

CellDecomposition wrap_cell(const Vec2& x, const Mat2& basis) {
  const Vec2 t = basis.partialPivLu().solve(x);
  Vec2 n(std::floor(t(0)), std::floor(t(1)));
  Vec2 f = t - n;
  for (int k = 0; k < 2; ++k) {
    if (f(k) >= 1.0) {  // rounding pushed a tiny negative remainder onto the boundary
      f(k) = 0.0;
      n(k) += 1.0;
    }
  }
  CellDecomposition d;
  d.floor_part = basis * n;
  d.frac_part = x - d.floor_part;
  return d;
}

Vec2 disregistry_transform(const BilayerGeometry& g, int layer, const Vec2& r) {
  if (layer != 1 && layer != 2) throw InvalidParameter("layer must be 1 or 2");
  const Mat2& aj = g.layer(layer);
  const Vec2 t = aj.partialPivLu().solve(r);
  for (int k = 0; k < 2; ++k) {
    if (std::abs(t(k) - std::round(t(k))) > kLatticeTolerance) {
      std::ostringstream os;
      os << "point (" << r(0) << ", " << r(1) << ") is not in the lattice of layer " << layer;
      throw NotLatticePoint(os.str());
    }
  }
  const Vec2 mfrac = wrap_cell(r, g.a_moire).frac_part;
  Vec2 out = g.disregistry(layer) * mfrac;
  if (layer == 1) out += g.a2 * Vec2(1.0, 1.0);
  // D_{1->2} maps the moire cell onto -cell_2, so the shifted image lands on
  // A2 (0,1]^2; fold the closed edge back to the half-open convention.
  const Mat2& other = g.other_layer(layer);
  Vec2 s = other.partialPivLu().solve(out);
  s = Vec2(half_open_frac(s(0)), half_open_frac(s(1)));
  return other * s;
}

double moire_constant(const BilayerGeometry& g) { return g.a_moire.col(0).norm(); }

}  // namespace twistab
