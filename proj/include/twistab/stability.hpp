#pragma once

#include <functional>
#include <string>
#include <vector>

#include "twistab/geometry.hpp"
#include "twistab/misfit.hpp"
#include "twistab/potentials.hpp"
#include "twistab/relax.hpp"
#include "twistab/types.hpp"

namespace twistab {

enum class Criterion { stable_sum, instability_integral, discrete_ansatz, gsfe_well };
enum class Verdict { stable, unstable, inconclusive };

std::string criterion_name(Criterion c);
std::string verdict_name(Verdict v);

inline constexpr double kDefaultTolEig = 1e-6;
inline constexpr double kDefaultTailTol = 1e-8;

struct StabilitySample {
  Vec2 x;
  double min_eig = 0;
};

struct StabilityReport {
  Criterion criterion = Criterion::stable_sum;
  Verdict verdict = Verdict::inconclusive;
  double tol_eig = kDefaultTolEig;
  Vec3 worst_direction = Vec3::UnitZ();
  std::vector<StabilitySample> samples;
  double min_eig = 0;
  // diagnostics
  double cutoff = 0;
  double quad_err = 0;
  int n_samples = 0;
  double positive_fraction = 0;
};

/// Relative displacement between the layers as a function of physical
/// position (Angstrom). `shift_bound` bounds |field| everywhere and feeds the
/// cutoff margins.
class DifferenceField {
 public:
  using Fn = std::function<Vec2(const Vec2&)>;

  static DifferenceField zero();
  /// Homobilayer reduction u1 = u, u2 = -u of a reduced relaxed field:
  /// x -> -a [u(a1^-1 x) + u(a2^-1 x)].
  static DifferenceField homobilayer(const BilayerGeometry& g, const Mat2& a, const DisplacementField& u,
                                     double drop_tol = 1e-10);
  static DifferenceField custom(Fn f, double shift_bound);

  Vec2 operator()(const Vec2& x) const { return fn_ ? fn_(x) : Vec2::Zero(); }
  bool is_zero() const { return !fn_; }
  double shift_bound() const { return bound_; }

 private:
  Fn fn_;
  double bound_ = 0;
};

/// Estimate of the neglected part of the layer-1 lattice sum of |D^2 v| beyond `cutoff`.
double stability_tail_bound(const BilayerGeometry& g, const PairPotential& p, double cutoff,
                            double shift_bound = 0.0);

/// Smallest cutoff (grown geometrically from 10 Angstrom) meeting `tail_tol`.
double required_cutoff(const BilayerGeometry& g, const PairPotential& p, double tail_tol = kDefaultTailTol,
                       double shift_bound = 0.0);

/// sum over R1 with |x - R1| <= cutoff of D^2 v(x - R1 + ueq(x - R1), d).
/// Throws CutoffTooSmall when the tail estimate exceeds `tail_tol`.
Mat3 stability_matrix(const BilayerGeometry& g, const PairPotential& p, const DifferenceField& ueq,
                      const Vec2& x, double cutoff, double tail_tol = kDefaultTailTol);

/// Minimum eigenvalue of stability_matrix over a grid_res x grid_res grid of the layer-1 cell.
StabilityReport stability_report(const BilayerGeometry& g, const PairPotential& p, const DifferenceField& ueq,
                                 int grid_res, double cutoff, double tol_eig = kDefaultTolEig,
                                 double tail_tol = kDefaultTailTol);

/// Same criterion restricted to the given sample points (Angstrom).
StabilityReport stability_report_at(const BilayerGeometry& g, const PairPotential& p,
                                    const DifferenceField& ueq, const std::vector<Vec2>& points,
                                    double cutoff, double tol_eig = kDefaultTolEig,
                                    double tail_tol = kDefaultTailTol);

struct InstabilityResult {
  Mat3 matrix;
  double error = 0;
  double cutoff = 0;
  StabilityReport report;
};

/// int_{R^2} D^2 v(x + ueq(x), d) dx by polar adaptive quadrature.
InstabilityResult instability_matrix(const BilayerGeometry& g, const PairPotential& p,
                                     const DifferenceField& ueq, double quad_tol = 1e-8,
                                     double tol_eig = kDefaultTolEig);

/// 1 on [0, r], 0 beyond r + width, quintic smooth step in between.
double bump_profile(double rho, double r, double width);

enum class BumpAlignment { antiparallel, parallel };

struct DiscreteFormResult {
  double value = 0;
  double interaction_cutoff = 0;
  long long pair_count = 0;
};

/// Interlayer quadratic form sum_{R1,R2} (v1(R1) - v2(R2))^T D^2 v(R1 - R2) (v1(R1) - v2(R2))
/// for vertical bumps v_j = +-phi_R |cell_j|^(1/2) / ((2 pi)^(1/2) R) e_z.
DiscreteFormResult discrete_form(const BilayerGeometry& g, const PairPotential& p, double r_bump,
                                 BumpAlignment align = BumpAlignment::antiparallel,
                                 double interaction_rel_tol = 1e-7);
double discrete_form_value(const BilayerGeometry& g, const PairPotential& p, double r_bump);

/// (|G1|^(1/2) + |G2|^(1/2))^2 / (2 pi |G1| / |G2|) as printed with the ansatz.
double ansatz_prefactor_printed(const BilayerGeometry& g);
/// (|G1|^(1/2) + |G2|^(1/2))^2 / (2 |G1| |G2|): large-R limit of the brute-force sum divided by m(d).
double ansatz_prefactor_derived(const BilayerGeometry& g);

/// Minimum eigenvalue of the GSFE Hessian along a stacking field.
StabilityReport gsfe_stability(const MisfitSurface& s, const std::vector<Vec2>& stacking,
                               double tol_eig = kDefaultTolEig);

}  // namespace twistab
