#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "twistab/misfit.hpp"
#include "twistab/types.hpp"

namespace twistab {

/// Isotropic linear elasticity C_klmn = lam d_kl d_mn + mu (d_kn d_lm + d_km d_ln)
/// and its image E under the change to reduced moire coordinates:
/// grad u = eps * A grad U A^-1 R(-pi/2), so grad u : C : grad u = eps^2 grad U : E : grad U.
struct ElasticityTensor {
  double lam = 0;
  double mu = 0;
  std::array<double, 16> components{};  // index ((k*2 + l)*2 + m)*2 + n
  std::array<double, 16> transformed{};

  static ElasticityTensor make(double lam, double mu, const Mat2& a);

  double contract(const Mat2& m) const;              // M : C : M
  double contract_transformed(const Mat2& g) const;  // G : E : G

  static constexpr int index(int k, int l, int m, int n) { return ((k * 2 + l) * 2 + m) * 2 + n; }
};

/// Periodic in-plane displacement on a uniform grid over the unit torus, in
/// reduced units. Node (i, j) sits at y = (i/res, j/res); storage is row-major in i.
struct DisplacementField {
  int grid_res = 0;
  std::vector<double> u1, u2;
  bool mean_zero = true;

  static DisplacementField zero(int res);
  static DisplacementField constant(int res, const Vec2& c);
  /// Low-mode (|k|_inf <= 3) field with fixed-seed normal coefficients,
  /// zero mean, scaled so max |u| = amplitude.
  static DisplacementField smooth_random(int res, double amplitude, std::uint64_t seed);

  std::size_t size() const { return u1.size(); }
  Vec2 at(int i, int j) const { return Vec2(u1[i * grid_res + j], u2[i * grid_res + j]); }
  Vec2 mean() const;
};

struct RelaxProblem {
  MisfitSurface surface;
  ElasticityTensor elasticity;
  double epsilon = 1.0;
  int grid_res = 128;
  /// Subtracted from the misfit so the wells sit at zero; 0 for GSFE surfaces.
  double energy_offset = 0.0;

  /// Validates inputs; for lattice-sum surfaces locates the AB well by Newton
  /// refinement and stores its value as the offset.
  static RelaxProblem make(const MisfitSurface& s, const ElasticityTensor& e, double epsilon,
                           int grid_res);
};

/// eps = 2 sin(theta / 2)
double epsilon_from_twist(double theta);

/// Equal-weight periodic quadrature of eps grad u : E : grad u + (Phi0(y + 2u) - offset) / eps
/// with spectral gradients.
double energy(const RelaxProblem& prob, const DisplacementField& u);

/// L2 gradient (res^2 times the nodal partials) of the discretized energy.
DisplacementField gradient(const RelaxProblem& prob, const DisplacementField& u);

/// Gradient with its grid mean removed (the mean-zero constraint multiplier).
DisplacementField project_mean_zero(const DisplacementField& g);

struct TraceRow {
  int iter = 0;
  double energy = 0;
  double grad_inf = 0;
};

struct MinimizeOptions {
  int max_iter = 100000;
  int memory = 10;
  double armijo = 1e-4;
  double first_step = 1e-2;  // max-norm (reduced units) of the first trial step
};

struct MinimizeDiagnostics {
  int iterations = 0;
  double final_grad_inf = 0;
  double final_energy = 0;
  bool converged = false;
  std::string message;
  std::vector<TraceRow> trace;  // initial state plus every accepted step
};

struct MinimizeResult {
  DisplacementField u;
  MinimizeDiagnostics diagnostics;
};

/// L-BFGS with Armijo backtracking on the (mean-projected) gradient. Stops when
/// the projected gradient max-norm falls below `tol`. Non-convergence is
/// reported through `diagnostics.converged`; the best iterate is returned.
MinimizeResult minimize(const RelaxProblem& prob, const DisplacementField& u0, double tol,
                        const MinimizeOptions& opt = {});

/// Stacking s(y) = y + 2 u(y) mod Z^2 per node; returned as res*res points.
std::vector<Vec2> stacking_field(const DisplacementField& u);

/// Torus distance (reduced Euclidean metric) between two points of [0,1)^2.
double torus_distance(const Vec2& a, const Vec2& b);

/// Fraction of stacking samples within `delta` of either well.
double well_occupancy(const std::vector<Vec2>& s, double delta,
                      const std::array<Vec2, 2>& wells = {Vec2(1.0 / 3.0, 1.0 / 3.0),
                                                           Vec2(2.0 / 3.0, 2.0 / 3.0)});

/// Trigonometric interpolant of a grid field; modes with magnitude below
/// `drop_tol` times the largest are dropped.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const DisplacementField& u, double drop_tol = 1e-12);
  Vec2 operator()(const Vec2& y) const;
  std::size_t mode_count() const { return modes_.size(); }

 private:
  struct Mode {
    int k1, k2;
    std::complex<double> c1, c2;
  };
  std::vector<Mode> modes_;
};

/// Checkpoint text: "u <res>" then "i,j,u1,u2" rows.
std::string write_checkpoint(const DisplacementField& u);
DisplacementField read_checkpoint(const std::string& text);

}  // namespace twistab
