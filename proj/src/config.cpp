#include "twistab/config.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "twistab/errors.hpp"

namespace twistab {

namespace {

using Json = nlohmann::json;

// Strict view of one JSON object: every key must be consumed by a getter.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void number(const std::string& key, double& out, double lo = -std::numeric_limits<double>::infinity(),
              bool lo_strict = false) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number()) fail(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(at(key), "must be finite");
    if (lo_strict ? !(x > lo) : !(x >= lo)) fail(at(key), lo_strict ? "must be > " + fmt(lo) : "must be >= " + fmt(lo));
    out = x;
  }

  void positive(const std::string& key, double& out) { number(key, out, 0.0, true); }

  void integer(const std::string& key, int& out, int lo) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) fail(at(key), "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > std::numeric_limits<int>::max()) fail(at(key), "must be an integer >= " + std::to_string(lo));
    out = static_cast<int>(x);
  }

  void unsigned64(const std::string& key, std::uint64_t& out) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      fail(at(key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void string(const std::string& key, std::string& out) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    out = v.get<std::string>();
  }

  void numbers(const std::string& key, std::vector<double>& out, bool positive_only, bool allow_empty) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_array()) fail(at(key), "expected an array of numbers");
    std::vector<double> tmp;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = at(key) + "[" + std::to_string(i) + "]";
      if (!v[i].is_number()) fail(p, "expected a number");
      const double x = v[i].get<double>();
      if (!std::isfinite(x) || (positive_only && !(x > 0))) fail(p, "must be finite and positive");
      tmp.push_back(x);
    }
    if (tmp.empty() && !allow_empty) fail(at(key), "must be nonempty");
    out = tmp;
  }

  void integers(const std::string& key, std::vector<int>& out, int lo) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_array() || v.empty()) fail(at(key), "expected a nonempty array of integers");
    std::vector<int> tmp;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = at(key) + "[" + std::to_string(i) + "]";
      if (!v[i].is_number_integer() || v[i].get<long long>() < lo || v[i].get<long long>() > 1000000)
        fail(p, "expected an integer >= " + std::to_string(lo));
      tmp.push_back(v[i].get<int>());
    }
    out = tmp;
  }

  void int_pair(const std::string& key, std::array<int, 2>& out) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
      fail(at(key), "expected two integers");
    out = {v[0].get<int>(), v[1].get<int>()};
  }

  void vec2(const std::string& key, Vec2& out) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail(at(key), "expected two numbers");
    out = Vec2(v[0].get<double>(), v[1].get<double>());
    if (!out.allFinite()) fail(at(key), "must be finite");
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    return Section(j_.at(key), at(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] static void fail(const std::string& path, const std::string& why) {
    throw ConfigInvalid(path + ": " + why);
  }

 private:
  static std::string fmt(double x) { return io::format_double(x); }

  bool take(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

PairPotential parse_potential(Section& s, double height) {
  std::string kind = "lennard_jones";
  s.string("kind", kind);
  PairPotential p;
  p.height = height;
  if (kind == "lennard_jones") {
    LennardJones k = std::get<LennardJones>(presets::lennard_jones_bg().kind);
    s.positive("eps0_meV", k.eps0);
    s.positive("sigma_A", k.sigma);
    p.kind = k;
  } else if (kind == "morse") {
    Morse k = std::get<Morse>(presets::morse_bg().kind);
    s.positive("e0_meV", k.e0);
    s.positive("kappa_per_A", k.kappa);
    s.positive("r0_A", k.r0);
    p.kind = k;
  } else if (kind == "kolmogorov_crespi") {
    KolmogorovCrespi k = std::get<KolmogorovCrespi>(presets::kolmogorov_crespi_bg().kind);
    s.number("c_meV", k.c);
    s.number("c0_meV", k.c0);
    s.number("c2_meV", k.c2);
    s.number("c4_meV", k.c4);
    s.positive("delta_A", k.delta);
    s.positive("lambda_per_A", k.lambda);
    s.number("a0_meV", k.a0);
    s.positive("z0_A", k.z0);
    p.kind = k;
  } else if (kind == "product_morse_lj") {
    ProductMorseLJ k = std::get<ProductMorseLJ>(presets::product_morse_lj_bg().kind);
    s.positive("e0_meV", k.e0);
    s.positive("kappa_per_A", k.kappa);
    s.positive("r0_A", k.r0);
    s.positive("sigma_A", k.sigma);
    p.kind = k;
  } else {
    Section::fail(s.at("kind"), "unknown potential kind '" + kind + "'");
  }
  s.finish();
  try {
    validate(p);
  } catch (const Error& e) {
    Section::fail("potential", e.what());
  }
  return p;
}

io::Json potential_json(const PairPotential& p) {
  io::Json j;
  j["kind"] = kind_name(p);
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LennardJones>) {
          j["eps0_meV"] = k.eps0;
          j["sigma_A"] = k.sigma;
        } else if constexpr (std::is_same_v<T, Morse>) {
          j["e0_meV"] = k.e0;
          j["kappa_per_A"] = k.kappa;
          j["r0_A"] = k.r0;
        } else if constexpr (std::is_same_v<T, KolmogorovCrespi>) {
          j["c_meV"] = k.c;
          j["c0_meV"] = k.c0;
          j["c2_meV"] = k.c2;
          j["c4_meV"] = k.c4;
          j["delta_A"] = k.delta;
          j["lambda_per_A"] = k.lambda;
          j["a0_meV"] = k.a0;
          j["z0_A"] = k.z0;
        } else {
          j["e0_meV"] = k.e0;
          j["kappa_per_A"] = k.kappa;
          j["r0_A"] = k.r0;
          j["sigma_A"] = k.sigma;
        }
      },
      p.kind);
  return j;
}

TestFamily parse_family(const std::string& s, const std::string& path) {
  if (s == "constant") return TestFamily::constant;
  if (s == "character") return TestFamily::character;
  if (s == "von_mises") return TestFamily::von_mises;
  Section::fail(path, "unknown test family '" + s + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigInvalid(std::string("<root>: malformed JSON: ") + e.what());
  }
  RunConfig c;
  Section top(root, "");

  if (top.has("geometry")) {
    Section g = top.sub("geometry");
    g.positive("lattice_constant_A", c.geometry.lattice_constant_A);
    g.number("twist_deg", c.geometry.twist_deg);
    g.finish();
  }
  top.positive("interlayer_distance_A", c.interlayer_distance_A);
  c.potential.height = c.interlayer_distance_A;
  if (top.has("potential")) {
    Section p = top.sub("potential");
    c.potential = parse_potential(p, c.interlayer_distance_A);
  }
  if (top.has("elasticity")) {
    Section e = top.sub("elasticity");
    e.number("lam_meV", c.elasticity.lam_meV);
    e.positive("mu_meV", c.elasticity.mu_meV);
    e.finish();
    if (!(c.elasticity.lam_meV + c.elasticity.mu_meV > 0)) Section::fail("elasticity.lam_meV", "lam + mu must be positive");
  }
  if (top.has("misfit")) {
    Section m = top.sub("misfit");
    m.string("source", c.misfit.source);
    if (c.misfit.source != "gsfe" && c.misfit.source != "lattice_sum")
      Section::fail("misfit.source", "expected 'gsfe' or 'lattice_sum'");
    if (m.has("coefficients")) {
      Section k = m.sub("coefficients");
      k.number("c0_meV", c.misfit.coefficients.c0);
      k.number("c1_meV", c.misfit.coefficients.c1);
      k.number("c2_meV", c.misfit.coefficients.c2);
      k.number("c3_meV", c.misfit.coefficients.c3);
      k.finish();
    }
    m.finish();
  }
  if (top.has("numerics")) {
    Section n = top.sub("numerics");
    NumericsConfig& v = c.numerics;
    n.integer("n_trunc", v.n_trunc, 1);
    n.integers("n_list", v.n_list, 1);
    for (std::size_t i = 1; i < v.n_list.size(); ++i)
      if (v.n_list[i] <= v.n_list[i - 1]) Section::fail("numerics.n_list", "must be strictly increasing");
    n.integer("grid_res", v.grid_res, 4);
    n.numbers("epsilon_list", v.epsilon_list, true, true);
    n.integer("surface_res", v.surface_res, 2);
    n.integer("stability_grid_res", v.stability_grid_res, 4);
    n.number("cutoff_A", v.cutoff_A, 0.0);
    n.positive("z_min_A", v.z_min_A);
    n.positive("z_max_A", v.z_max_A);
    n.positive("z_step_A", v.z_step_A);
    if (!(v.z_max_A > v.z_min_A)) Section::fail("numerics.z_max_A", "must exceed z_min_A");
    n.numbers("r_bump_lattice", v.r_bump_lattice, true, false);
    for (double r : v.r_bump_lattice)
      if (r < 5) Section::fail("numerics.r_bump_lattice", "bump radii must be at least 5 lattice constants");
    n.integer("max_iter", v.max_iter, 0);
    n.number("perturbation", v.perturbation, 0.0);
    n.number("occupancy_delta", v.occupancy_delta, 0.0, true);
    if (!(v.occupancy_delta < 1.0 / 6.0)) Section::fail("numerics.occupancy_delta", "must be below 1/6");
    if (n.has("tolerances")) {
      Section t = n.sub("tolerances");
      t.positive("relax_grad", v.tolerances.relax_grad);
      t.number("tol_eig", v.tolerances.tol_eig, 0.0);
      t.positive("tail", v.tolerances.tail);
      t.positive("quad", v.tolerances.quad);
      t.finish();
    }
    n.finish();
  }
  if (top.has("ergodic")) {
    Section e = top.sub("ergodic");
    ErgodicConfig& v = c.ergodic;
    std::string fam = family_name(v.f.family);
    e.string("family", fam);
    v.f.family = parse_family(fam, "ergodic.family");
    e.number("amplitude", v.f.amplitude);
    e.int_pair("k_moire", v.f.k_moire);
    e.int_pair("k_layer", v.f.k_layer);
    e.number("phase", v.f.phase);
    e.number("kappa", v.f.kappa);
    e.integer("layer", v.layer, 1);
    if (v.layer > 2) Section::fail("ergodic.layer", "must be 1 or 2");
    e.vec2("omega_moire", v.omega_moire);
    e.vec2("omega", v.omega);
    e.integers("n_list", v.n_list, 1);
    e.finish();
  }
  top.unsigned64("seed", c.seed);
  top.string("output_dir", c.output_dir);
  top.finish();
  return c;
}

io::Json config_to_json(const RunConfig& c, bool with_output) {
  io::Json j;
  j["geometry"] = {{"lattice_constant_A", c.geometry.lattice_constant_A}, {"twist_deg", c.geometry.twist_deg}};
  j["potential"] = potential_json(c.potential);
  j["interlayer_distance_A"] = c.interlayer_distance_A;
  j["elasticity"] = {{"lam_meV", c.elasticity.lam_meV}, {"mu_meV", c.elasticity.mu_meV}};
  const GsfeSource& k = c.misfit.coefficients;
  j["misfit"] = {{"source", c.misfit.source},
                 {"coefficients", {{"c0_meV", k.c0}, {"c1_meV", k.c1}, {"c2_meV", k.c2}, {"c3_meV", k.c3}}}};
  const NumericsConfig& n = c.numerics;
  io::Json num;
  num["n_trunc"] = n.n_trunc;
  num["n_list"] = n.n_list;
  num["grid_res"] = n.grid_res;
  num["epsilon_list"] = n.epsilon_list;
  num["surface_res"] = n.surface_res;
  num["stability_grid_res"] = n.stability_grid_res;
  num["cutoff_A"] = n.cutoff_A;
  num["z_min_A"] = n.z_min_A;
  num["z_max_A"] = n.z_max_A;
  num["z_step_A"] = n.z_step_A;
  num["r_bump_lattice"] = n.r_bump_lattice;
  num["max_iter"] = n.max_iter;
  num["perturbation"] = n.perturbation;
  num["occupancy_delta"] = n.occupancy_delta;
  num["tolerances"] = {{"relax_grad", n.tolerances.relax_grad},
                       {"tol_eig", n.tolerances.tol_eig},
                       {"tail", n.tolerances.tail},
                       {"quad", n.tolerances.quad}};
  j["numerics"] = num;
  const ErgodicConfig& e = c.ergodic;
  j["ergodic"] = {{"family", family_name(e.f.family)},
                  {"amplitude", e.f.amplitude},
                  {"k_moire", e.f.k_moire},
                  {"k_layer", e.f.k_layer},
                  {"phase", e.f.phase},
                  {"kappa", e.f.kappa},
                  {"layer", e.layer},
                  {"omega_moire", io::to_json(e.omega_moire)},
                  {"omega", io::to_json(e.omega)},
                  {"n_list", e.n_list}};
  j["seed"] = c.seed;
  if (with_output) j["output_dir"] = c.output_dir;
  return j;
}

std::string config_hash(const RunConfig& c) { return io::sha256_hex(io::dump(config_to_json(c, false))); }

}  // namespace twistab
