#include <doctest.h>

#include "twistab/config.hpp"
#include "twistab/errors.hpp"

using namespace twistab;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigInvalid& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = parse_config("{}");
  CHECK(c.geometry.lattice_constant_A == 2.46);
  CHECK(c.geometry.twist_deg == 1.1);
  CHECK(c.interlayer_distance_A == 3.35);
  CHECK(kind_name(c.potential) == "lennard_jones");
  CHECK(c.numerics.grid_res == 128);
  CHECK(c.numerics.epsilon_list == std::vector<double>{0.5, 0.25, 0.125});
  CHECK(c.seed == 0);
  CHECK(c.output_dir == "out");
}

TEST_CASE("potential blocks") {
  const RunConfig m = parse_config(R"({"potential": {"kind": "morse", "e0_meV": 3.0, "kappa_per_A": 1.5, "r0_A": 3.7}})");
  const auto& k = std::get<Morse>(m.potential.kind);
  CHECK(k.e0 == 3.0);
  CHECK(k.kappa == 1.5);
  CHECK(k.r0 == 3.7);

  const RunConfig h = parse_config(R"({"interlayer_distance_A": 3.5, "potential": {"kind": "kolmogorov_crespi"}})");
  CHECK(kind_name(h.potential) == "kolmogorov_crespi");
  CHECK(h.potential.height == 3.5);
}

TEST_CASE("validation names the key path") {
  CHECK(error_of(R"({"geometry": {"twist": 1}})").find("geometry.twist") != std::string::npos);
  CHECK(error_of(R"({"numerics": {"tolerances": {"tail": -1}}})").find("numerics.tolerances.tail") != std::string::npos);
  CHECK(error_of(R"({"numerics": {"grid_res": 2.5}})").find("numerics.grid_res") != std::string::npos);
  CHECK(error_of(R"({"potential": {"kind": "lennard_jones", "sigma_A": -3}})").find("potential") != std::string::npos);
  CHECK(error_of(R"({"potential": {"kind": "tersoff"}})").find("potential.kind") != std::string::npos);
  CHECK(error_of(R"({"misfit": {"source": "dft"}})").find("misfit.source") != std::string::npos);
  CHECK(error_of(R"({"numerics": {"n_list": [4, 2]}})").find("numerics.n_list") != std::string::npos);
  CHECK(error_of(R"({"elasticity": {"lam_meV": "ten"}})").find("elasticity.lam_meV") != std::string::npos);
  CHECK_FALSE(error_of("{not json").empty());
  CHECK_FALSE(error_of("[1, 2]").empty());
}

TEST_CASE("hash tracks semantic fields only") {
  const RunConfig a = parse_config("{}");
  const RunConfig b = parse_config(R"({"output_dir": "elsewhere"})");
  const RunConfig c = parse_config(R"({"seed": 1})");
  const RunConfig d = parse_config(R"({"geometry": {"twist_deg": 1.1}})");
  const RunConfig e = parse_config(R"({"numerics": {"tolerances": {"quad": 1e-9}}})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) == config_hash(d));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a) != config_hash(e));
  CHECK(config_hash(a).size() == 64);
}

TEST_CASE("canonical form round trips") {
  const RunConfig a = parse_config(R"({"potential": {"kind": "product_morse_lj"}, "ergodic": {"family": "von_mises", "kappa": 2}})");
  const RunConfig b = parse_config(io::dump(config_to_json(a)));
  CHECK(io::dump(config_to_json(a)) == io::dump(config_to_json(b)));
  CHECK(config_hash(a) == config_hash(b));
}
