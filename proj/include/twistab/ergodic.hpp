#pragma once

#include <array>
#include <string>
#include <vector>

#include "twistab/geometry.hpp"
#include "twistab/types.hpp"

namespace twistab {

enum class TestFamily { constant, character, von_mises };

/// Smooth test function f(x, y), periodic in x over the moire cell and in y
/// over the cell of the opposite layer. Written in reduced coordinates
/// xr = a_moire^-1 x and yr = a_other^-1 y:
///   constant:  amplitude
///   character: amplitude cos(2 pi (k_moire . xr + k_layer . yr) + phase)
///   von_mises: amplitude exp(kappa (cos(2 pi (xr1 + yr2)) + cos(2 pi xr2)))
struct TestFunction {
  TestFamily family = TestFamily::constant;
  double amplitude = 1.0;
  std::array<int, 2> k_moire{0, 0};
  std::array<int, 2> k_layer{0, 0};
  double phase = 0.0;
  double kappa = 1.0;

  double operator()(const Vec2& xr, const Vec2& yr) const;
};

std::string family_name(TestFamily f);

struct ErgodicExperiment {
  BilayerGeometry geom;
  int layer = 1;  // j: the lattice summed over
  TestFunction f;
  Vec2 omega_moire = Vec2::Zero();
  Vec2 omega = Vec2::Zero();
  std::vector<int> n_list;
};

/// sum_{|n|_inf <= n} f(R + omega_moire, R + omega) / (2n+1)^2 with R = a_j n,
/// reduced row by row with pairwise summation.
double truncated_average(const ErgodicExperiment& e, int n);

struct LimitValue {
  double value = 0;
  double error = 0;
};

/// int_{[0,1]^2} f(a_moire t + omega_moire, D a_moire t + omega) dt by adaptive
/// quadrature. Throws QuadratureNotConverged.
LimitValue ergodic_limit(const ErgodicExperiment& e, double tol = 1e-9);

struct ConvergenceRow {
  int n = 0;
  double value = 0;
  double abs_err = 0;
};

struct ConvergenceCurve {
  std::vector<ConvergenceRow> rows;
  double limit = 0;
  double limit_error = 0;
  /// max_{n <= m < 2n} |average(m) - limit| per row. The pointwise errors dip
  /// at zeros of the box Dirichlet kernel, so rates are fitted on this envelope.
  std::vector<double> envelope;
  /// Least-squares log-log slope of the envelope; NaN when every error sits
  /// at the roundoff floor (exact averages).
  double slope = 0;
  double pointwise_slope = 0;  // same fit on abs_err, for reference
  bool exact = false;
  bool degraded = false;  // slope above -0.5
};

ConvergenceCurve convergence_curve(const ErgodicExperiment& e, const std::vector<int>& n_list);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace twistab
