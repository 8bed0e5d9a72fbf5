#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "twistab/potentials.hpp"
#include "twistab/types.hpp"

namespace twistab {

/// Truncated lattice sum Phi0(y) = sum_{|n|_inf <= n_trunc} V(y - n) with
/// V(x) = v2d(a x) / |det a|. Values are per unit area of the physical plane.
struct LatticeSumSource {
  Mat2 a;
  PairPotential potential;
  int n_trunc = 10;
};

/// Trigonometric stacking-fault surface in reduced coordinates, evaluated as
/// Phi0_gsfe(2 pi y1, 2 pi y2). Coefficients in meV per unit cell.
struct GsfeSource {
  double c0 = 6.832, c1 = 4.064, c2 = -0.374, c3 = -0.095;
};

/// Misfit energy on the unit torus (reduced coordinates). Immutable.
struct MisfitSurface {
  std::variant<LatticeSumSource, GsfeSource> source;
  std::array<Vec2, 2> wells = {Vec2(1.0 / 3.0, 1.0 / 3.0), Vec2(2.0 / 3.0, 2.0 / 3.0)};

  static MisfitSurface gsfe(GsfeSource c = {});
  static MisfitSurface lattice_sum(const Mat2& a, const PairPotential& p, int n_trunc = 10);

  bool is_gsfe() const { return std::holds_alternative<GsfeSource>(source); }
  /// "gsfe" or "lattice_sum:<potential kind>:N=<n>"
  std::string tag() const;
};

struct GradHessian {
  Vec2 grad;
  Mat2 hess;
};

double misfit_value(const MisfitSurface& s, const Vec2& x);
GradHessian misfit_grad_hessian(const MisfitSurface& s, const Vec2& x);

/// Newton refinement of a critical point near `guess`.
Vec2 locate_well(const MisfitSurface& s, const Vec2& guess, int max_iter = 50);

struct WellRow {
  int n = 0;
  double min_eig_ab = 0;
  double min_eig_ba = 0;
  double tail_bound = 0;  // estimate of the neglected Hessian tail at this N
};

struct WellReport {
  std::vector<WellRow> rows;
  bool stable = false;  // final row positive at both wells
  /// |e(N_k+1) - e(N_k)| non-increasing, with differences below 1e-12 relative
  /// treated as converged.
  bool cauchy = false;
};

WellReport well_report(const Mat2& a, const PairPotential& p, const std::vector<int>& n_list);
WellReport well_report(const MisfitSurface& gsfe);

/// res x res values at (i/res, j/res), row-major in i.
std::vector<double> surface_grid(const MisfitSurface& s, int res);

double min_eigenvalue(const Mat2& m);

}  // namespace twistab
