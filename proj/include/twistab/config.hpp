#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "twistab/ergodic.hpp"
#include "twistab/io.hpp"
#include "twistab/misfit.hpp"
#include "twistab/potentials.hpp"

namespace twistab {

struct GeometryConfig {
  double lattice_constant_A = 2.46;
  double twist_deg = 1.1;
};

struct ElasticityConfig {
  double lam_meV = 10.0;
  double mu_meV = 10.0;
};

struct MisfitConfig {
  std::string source = "gsfe";  // gsfe | lattice_sum
  GsfeSource coefficients;
};

struct Tolerances {
  double relax_grad = 1e-3;
  double tol_eig = 1e-6;
  double tail = 1e-8;
  double quad = 1e-8;
};

struct NumericsConfig {
  int n_trunc = 10;
  std::vector<int> n_list = {2, 4, 6, 8, 10};
  int grid_res = 128;
  std::vector<double> epsilon_list = {0.5, 0.25, 0.125};
  int surface_res = 240;
  int stability_grid_res = 24;
  double cutoff_A = 0.0;  // 0 selects the smallest cutoff meeting the tail tolerance
  double z_min_A = 3.0;
  double z_max_A = 4.5;
  double z_step_A = 0.01;
  std::vector<double> r_bump_lattice = {20, 40, 80};
  int max_iter = 100000;
  double perturbation = 1e-3;
  double occupancy_delta = 0.05;
  Tolerances tolerances;
};

struct ErgodicConfig {
  TestFunction f = [] {
    TestFunction t;
    t.family = TestFamily::character;
    t.k_moire = {1, 0};
    t.phase = 0.3;
    return t;
  }();
  int layer = 1;
  Vec2 omega_moire = Vec2(0.37, 0.11);
  Vec2 omega = Vec2(0.21, -0.4);
  std::vector<int> n_list = {25, 50, 100, 200};
};

struct RunConfig {
  GeometryConfig geometry;
  PairPotential potential = presets::lennard_jones_bg();
  double interlayer_distance_A = 3.35;
  ElasticityConfig elasticity;
  MisfitConfig misfit;
  NumericsConfig numerics;
  ErgodicConfig ergodic;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
};

/// Parses and validates a JSON config. Unknown keys, wrong types and
/// out-of-range values raise ConfigInvalid naming the key path.
RunConfig parse_config(const std::string& text);

/// Canonical defaults-filled form; `with_output` controls whether output_dir is included.
io::Json config_to_json(const RunConfig& c, bool with_output = true);

/// SHA-256 of the canonical form without output_dir.
std::string config_hash(const RunConfig& c);

}  // namespace twistab
