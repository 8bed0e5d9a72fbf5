#pragma once

#include "twistab/types.hpp"

namespace twistab {

/// Lattice data of a twisted bilayer. Lengths in Angstrom, reciprocal
/// quantities in 1/Angstrom. Immutable once built.
struct BilayerGeometry {
  Mat2 a1, a2;       // layer bases (columns are primitive vectors)
  Mat2 a_moire;      // (a1^-1 - a2^-1)^-1
  Mat2 b1, b2;       // 2 pi a_j^-T
  Mat2 b_moire;      // b1 - b2
  Mat2 d12, d21;     // disregistry matrices I - a_{3-j} a_j^-1
  double theta = 0;  // radians
  double cell_area1 = 0, cell_area2 = 0, cell_area_moire = 0;

  const Mat2& layer(int j) const { return j == 1 ? a1 : a2; }
  const Mat2& other_layer(int j) const { return j == 1 ? a2 : a1; }
  /// D_{j -> 3-j}
  const Mat2& disregistry(int j) const { return j == 1 ? d12 : d21; }
  double cell_area(int j) const { return j == 1 ? cell_area1 : cell_area2; }
};

struct CellDecomposition {
  Vec2 floor_part;  // element of basis * Z^2
  Vec2 frac_part;   // element of basis * [0,1)^2
};

Mat2 rotation(double phi);

/// Triangular basis a * [[sqrt3/2, sqrt3/2], [-1/2, 1/2]].
Mat2 graphene_basis(double lattice_constant = 2.46);

/// Symmetric twist: a1 = R(theta/2) a, a2 = R(-theta/2) a.
/// Throws SingularMoire when a1^-1 - a2^-1 has condition number above 1e12.
BilayerGeometry build_twisted_pair(const Mat2& a, double theta);

/// Also accepts arbitrary bases; used for the heterobilayer code paths.
BilayerGeometry build_bilayer(const Mat2& a1, const Mat2& a2, double theta = 0.0);

/// Decomposes x into a lattice point plus a remainder in the half-open cell.
CellDecomposition wrap_cell(const Vec2& x, const Mat2& basis);

/// Tolerance (basis coordinates) used to decide lattice membership.
inline constexpr double kLatticeTolerance = 1e-9;

/// Local disregistry of a lattice point r of layer `layer` with respect to the
/// opposite layer, computed through the disregistry matrix and the moire cell
/// remainder. Throws NotLatticePoint if r is not in layer `layer`'s lattice.
Vec2 disregistry_transform(const BilayerGeometry& g, int layer, const Vec2& r);

/// |a_moire e1| (the moire lattice constant for a pure twist).
double moire_constant(const BilayerGeometry& g);

}  // namespace twistab
