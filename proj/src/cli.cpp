#include "twistab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

#include "twistab/errors.hpp"
#include "twistab/geometry.hpp"
#include "twistab/io.hpp"
#include "twistab/misfit.hpp"
#include "twistab/parallel.hpp"
#include "twistab/relax.hpp"
#include "twistab/stability.hpp"

namespace twistab {

namespace {

namespace fs = std::filesystem;
using io::format_double;
using io::Json;

class Output {
 public:
  Output(std::string dir, std::vector<std::string>& files) : dir_(std::move(dir)), files_(files) {}

  void text(const std::string& name, const std::string& content) {
    io::write_text((fs::path(dir_) / name).string(), content);
    files_.push_back(name);
  }
  void json(const std::string& name, const Json& j) { text(name, io::dump(j)); }

 private:
  std::string dir_;
  std::vector<std::string>& files_;
};

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ",";
    first = false;
    out += c;
  }
  return out + "\n";
}

std::string opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("nan");
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

double radians(double deg) { return deg * kPi / 180.0; }

Mat2 layer_basis(const RunConfig& c) { return graphene_basis(c.geometry.lattice_constant_A); }

BilayerGeometry geometry_of(const RunConfig& c) {
  return build_twisted_pair(layer_basis(c), radians(c.geometry.twist_deg));
}

MisfitSurface surface_of(const RunConfig& c) {
  if (c.misfit.source == "gsfe") return MisfitSurface::gsfe(c.misfit.coefficients);
  return MisfitSurface::lattice_sum(layer_basis(c), c.potential, c.numerics.n_trunc);
}

Json report_json(const StabilityReport& r) {
  Json j;
  j["criterion"] = criterion_name(r.criterion);
  j["verdict"] = verdict_name(r.verdict);
  j["tol_eig"] = r.tol_eig;
  j["worst_direction"] = io::to_json(r.worst_direction);
  Json samples = Json::array();
  for (const auto& s : r.samples) samples.push_back({{"x", io::to_json(s.x)}, {"min_eig", s.min_eig}});
  j["samples"] = samples;
  j["diagnostics"] = {{"cutoff", r.cutoff}, {"quad_err", r.quad_err}, {"n_samples", r.n_samples}};
  return j;
}

void cmd_geometry(const RunConfig& c, Output& out) {
  const BilayerGeometry g = geometry_of(c);
  Json j;
  j["twist_rad"] = g.theta;
  j["epsilon"] = epsilon_from_twist(g.theta);
  j["a1"] = io::to_json(g.a1);
  j["a2"] = io::to_json(g.a2);
  j["a_moire"] = io::to_json(g.a_moire);
  j["b1"] = io::to_json(g.b1);
  j["b2"] = io::to_json(g.b2);
  j["b_moire"] = io::to_json(g.b_moire);
  j["d12"] = io::to_json(g.d12);
  j["d21"] = io::to_json(g.d21);
  j["cell_area1_A2"] = g.cell_area1;
  j["cell_area2_A2"] = g.cell_area2;
  j["cell_area_moire_A2"] = g.cell_area_moire;
  j["moire_constant_A"] = moire_constant(g);
  j["moire_constant_formula_A"] = c.geometry.lattice_constant_A / epsilon_from_twist(g.theta);
  out.json("geometry.json", j);
}

void cmd_mz_scan(const RunConfig& c, Output& out) {
  const NumericsConfig& n = c.numerics;
  const double d = c.interlayer_distance_A;
  std::vector<double> zs;
  const int steps = static_cast<int>(std::floor((n.z_max_A - n.z_min_A) / n.z_step_A + 1e-9));
  bool has_d = false;
  for (int k = 0; k <= steps; ++k) {
    double z = n.z_min_A + k * n.z_step_A;
    if (std::abs(z - d) < 1e-9 * n.z_step_A) {
      z = d;
      has_d = true;
    }
    zs.push_back(z);
  }
  if (!has_d && d >= n.z_min_A && d <= n.z_max_A) {
    zs.push_back(d);
    std::sort(zs.begin(), zs.end());
  }
  std::vector<MzComparison> rows(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) { rows[i] = compare_mz(c.potential, zs[i]); });
  std::string csv = "z_A,closed_meV,quadrature_meV,quad_err_meV,identity_meV,printed_general_meV,product_derived_meV\n";
  for (const auto& r : rows)
    csv += csv_row({format_double(r.z), opt(r.closed), format_double(r.quadrature), format_double(r.quadrature_error),
                    opt(r.identity), opt(r.printed_general), opt(r.product_derived)});
  out.text("mz_scan.csv", csv);

  const MzComparison at = compare_mz(c.potential, d);
  Json rep;
  rep["potential"] = kind_name(c.potential);
  rep["z_A"] = d;
  rep["closed_meV"] = opt_json(at.closed);
  rep["quadrature_meV"] = at.quadrature;
  rep["quad_err_meV"] = at.quadrature_error;
  rep["identity_meV"] = opt_json(at.identity);
  rep["printed_general_meV"] = opt_json(at.printed_general);
  rep["product_derived_meV"] = opt_json(at.product_derived);
  Json disc;
  if (at.closed) disc["closed_minus_quadrature_meV"] = *at.closed - at.quadrature;
  if (at.identity) disc["identity_minus_quadrature_meV"] = *at.identity - at.quadrature;
  if (at.printed_general) disc["printed_general_minus_quadrature_meV"] = *at.printed_general - at.quadrature;
  if (at.product_derived && at.closed) disc["closed_over_product_derived"] = *at.closed / *at.product_derived;
  if (at.closed) disc["closed_sign_agrees_with_quadrature"] = (*at.closed > 0) == (at.quadrature > 0);
  rep["discrepancies"] = disc;
  Json roots;
  for (auto [name, method] : {std::pair{"closed", MzMethod::closed}, std::pair{"quadrature", MzMethod::quadrature}}) {
    Json list = Json::array();
    try {
      for (double r : sign_transition(c.potential, n.z_min_A, n.z_max_A, method)) list.push_back(r);
    } catch (const NoRootInBracket&) {
    } catch (const NoClosedForm&) {
      list = nullptr;
    }
    roots[name] = list;
  }
  roots["bracket_A"] = Json::array({n.z_min_A, n.z_max_A});
  rep["sign_transitions_A"] = roots;
  out.json("mz_report.json", rep);
}

void cmd_misfit_surface(const RunConfig& c, Output& out) {
  const MisfitSurface s = surface_of(c);
  const int res = c.numerics.surface_res;
  const std::vector<double> v = surface_grid(s, res);
  std::string csv = "# res=" + std::to_string(res) + " source=" + s.tag() + "\n";
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j)
      csv += csv_row({std::to_string(i), std::to_string(j), format_double(v[static_cast<std::size_t>(i) * res + j])});
  out.text("misfit_surface.csv", csv);
}

void cmd_well_report(const RunConfig& c, Output& out) {
  Json j;
  if (c.misfit.source == "gsfe") {
    const MisfitSurface s = surface_of(c);
    const WellReport r = well_report(s);
    const GsfeSource& k = c.misfit.coefficients;
    j["source"] = s.tag();
    j["min_eig_AB_meV"] = r.rows[0].min_eig_ab;
    j["min_eig_BA_meV"] = r.rows[0].min_eig_ba;
    j["closed_form_meV"] = 4 * kPi * kPi * (k.c1 / 2 - 3 * k.c2 + 2 * k.c3);
    j["stable"] = r.stable;
  } else {
    const WellReport r = well_report(layer_basis(c), c.potential, c.numerics.n_list);
    std::string csv = "n,min_eig_AB_meV,min_eig_BA_meV,tail_bound\n";
    Json rows = Json::array();
    for (const auto& w : r.rows) {
      csv += csv_row({std::to_string(w.n), format_double(w.min_eig_ab), format_double(w.min_eig_ba),
                      format_double(w.tail_bound)});
      rows.push_back({{"n", w.n}, {"min_eig_AB_meV", w.min_eig_ab}, {"min_eig_BA_meV", w.min_eig_ba},
                      {"tail_bound", w.tail_bound}});
    }
    out.text("well_report.csv", csv);
    j["source"] = "lattice_sum:" + kind_name(c.potential);
    j["min_eig_AB_meV"] = r.rows.back().min_eig_ab;
    j["min_eig_BA_meV"] = r.rows.back().min_eig_ba;
    j["stable"] = r.stable;
    j["cauchy"] = r.cauchy;
    j["rows"] = rows;
  }
  out.json("well_report.json", j);
}

double cutoff_of(const RunConfig& c, const BilayerGeometry& g) {
  return c.numerics.cutoff_A > 0 ? c.numerics.cutoff_A : required_cutoff(g, c.potential, c.numerics.tolerances.tail);
}

void cmd_stability_report(const RunConfig& c, Output& out) {
  const BilayerGeometry g = geometry_of(c);
  const double cut = cutoff_of(c, g);
  const Tolerances& t = c.numerics.tolerances;
  const DifferenceField zero = DifferenceField::zero();
  out.json("stability_report.json",
           report_json(stability_report(g, c.potential, zero, c.numerics.stability_grid_res, cut, t.tol_eig, t.tail)));
  const std::vector<Vec2> wells = {g.a1 * Vec2(1.0 / 3.0, 1.0 / 3.0), g.a1 * Vec2(2.0 / 3.0, 2.0 / 3.0)};
  out.json("stability_wells.json", report_json(stability_report_at(g, c.potential, zero, wells, cut, t.tol_eig, t.tail)));
}

void cmd_instability(const RunConfig& c, Output& out) {
  const BilayerGeometry g = geometry_of(c);
  const Tolerances& t = c.numerics.tolerances;
  const InstabilityResult r = instability_matrix(g, c.potential, DifferenceField::zero(), t.quad, t.tol_eig);
  Json j = report_json(r.report);
  j["matrix_meV"] = io::to_json(r.matrix);
  j["m_quadrature_meV"] = m_quadrature(c.potential, c.interlayer_distance_A);
  out.json("instability.json", j);
}

void cmd_discrete_ansatz(const RunConfig& c, Output& out) {
  const BilayerGeometry g = geometry_of(c);
  const double m = m_quadrature(c.potential, c.interlayer_distance_A);
  const double pp = ansatz_prefactor_printed(g), pd = ansatz_prefactor_derived(g);
  const double a = c.geometry.lattice_constant_A;
  std::string csv = "r_bump_lattice,r_bump_A,value_meV,parallel_meV,printed_limit_meV,derived_limit_meV\n";
  std::vector<double> rs, ep, ed;
  Json rows = Json::array();
  for (double rl : c.numerics.r_bump_lattice) {
    const double r = rl * a;
    const DiscreteFormResult anti = discrete_form(g, c.potential, r, BumpAlignment::antiparallel);
    const DiscreteFormResult par = discrete_form(g, c.potential, r, BumpAlignment::parallel);
    csv += csv_row({format_double(rl), format_double(r), format_double(anti.value), format_double(par.value),
                    format_double(pp * m), format_double(pd * m)});
    rs.push_back(r);
    ep.push_back(std::abs(anti.value - pp * m));
    ed.push_back(std::abs(anti.value - pd * m));
    rows.push_back({{"r_bump_A", r}, {"value_meV", anti.value}, {"parallel_meV", par.value},
                    {"interaction_cutoff_A", anti.interaction_cutoff}, {"pairs", anti.pair_count}});
  }
  out.text("discrete_ansatz.csv", csv);
  Json j;
  j["m_quadrature_meV"] = m;
  j["prefactor_printed"] = pp;
  j["prefactor_derived"] = pd;
  j["rows"] = rows;
  if (rs.size() >= 2) {
    j["slope_printed"] = loglog_slope(rs, ep);
    j["slope_derived"] = loglog_slope(rs, ed);
  }
  out.json("discrete_ansatz.json", j);
}

std::string eps_tag(std::size_t i) {
  std::string s = std::to_string(i);
  return "eps" + std::string(s.size() < 2 ? 2 - s.size() : 0, '0') + s;
}

void cmd_relax(const RunConfig& c, Output& out) {
  const NumericsConfig& n = c.numerics;
  const MisfitSurface s = surface_of(c);
  const ElasticityTensor e = ElasticityTensor::make(c.elasticity.lam_meV, c.elasticity.mu_meV, layer_basis(c));
  std::vector<double> eps = n.epsilon_list;
  if (eps.empty()) eps.push_back(epsilon_from_twist(radians(c.geometry.twist_deg)));
  MinimizeOptions opt;
  opt.max_iter = n.max_iter;
  Json rows = Json::array();
  bool all_converged = true;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const RelaxProblem prob = RelaxProblem::make(s, e, eps[i], n.grid_res);
    const DisplacementField u0 = DisplacementField::smooth_random(n.grid_res, n.perturbation, c.seed);
    const MinimizeResult r = minimize(prob, u0, n.tolerances.relax_grad, opt);
    const std::string tag = eps_tag(i);
    out.text("relax_" + tag + "_u.txt", write_checkpoint(r.u));
    std::string trace = "iter,energy_meV,grad_inf\n";
    for (const auto& t : r.diagnostics.trace)
      trace += csv_row({std::to_string(t.iter), format_double(t.energy), format_double(t.grad_inf)});
    out.text("relax_" + tag + "_trace.csv", trace);
    const std::vector<Vec2> st = stacking_field(r.u);
    Json row = {{"epsilon", eps[i]},
                {"iterations", r.diagnostics.iterations},
                {"converged", r.diagnostics.converged},
                {"message", r.diagnostics.message},
                {"energy_initial_meV", r.diagnostics.trace.front().energy},
                {"energy_final_meV", r.diagnostics.final_energy},
                {"grad_inf", r.diagnostics.final_grad_inf},
                {"well_occupancy", well_occupancy(st, n.occupancy_delta)}};
    if (s.is_gsfe()) row["gsfe_positive_fraction"] = gsfe_stability(s, st, n.tolerances.tol_eig).positive_fraction;
    rows.push_back(row);
    all_converged = all_converged && r.diagnostics.converged;
  }
  Json j;
  j["source"] = s.tag();
  j["grid_res"] = n.grid_res;
  j["occupancy_delta"] = n.occupancy_delta;
  j["identity_occupancy"] = well_occupancy(stacking_field(DisplacementField::zero(n.grid_res)), n.occupancy_delta);
  j["runs"] = rows;
  out.json("relax_summary.json", j);
  if (!all_converged) throw NotConverged("relaxation stopped before reaching the gradient tolerance");
}

void cmd_ergodic(const RunConfig& c, Output& out) {
  ErgodicExperiment e;
  e.geom = geometry_of(c);
  e.layer = c.ergodic.layer;
  e.f = c.ergodic.f;
  e.omega_moire = c.ergodic.omega_moire;
  e.omega = c.ergodic.omega;
  e.n_list = c.ergodic.n_list;
  const ConvergenceCurve cc = convergence_curve(e, e.n_list);
  std::string csv = "n,value,abs_err\n";
  for (const auto& r : cc.rows) csv += csv_row({std::to_string(r.n), format_double(r.value), format_double(r.abs_err)});
  out.text("ergodic.csv", csv);
  Json j;
  j["family"] = family_name(e.f.family);
  j["limit"] = cc.limit;
  j["limit_error"] = cc.limit_error;
  j["envelope"] = cc.envelope;
  j["slope"] = cc.slope;
  j["pointwise_slope"] = cc.pointwise_slope;
  j["exact"] = cc.exact;
  j["degraded"] = cc.degraded;
  out.json("ergodic.json", j);
}

using Handler = std::function<void(const RunConfig&, Output&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"geometry", cmd_geometry},
      {"mz-scan", cmd_mz_scan},
      {"misfit-surface", cmd_misfit_surface},
      {"well-report", cmd_well_report},
      {"stability-report", cmd_stability_report},
      {"instability", cmd_instability},
      {"discrete-ansatz", cmd_discrete_ansatz},
      {"relax", cmd_relax},
      {"ergodic", cmd_ergodic},
  };
  return h;
}

void write_manifest(const std::string& dir, const std::string& hash, const std::string& command,
                    const RunOutcome& o) {
  Json m;
  m["version"] = kVersion;
  m["config_sha256"] = hash.empty() ? Json(nullptr) : Json(hash);
  m["command"] = command;
  m["files"] = o.files;
  m["status"] = o.status;
  if (o.status != "ok") {
    m["error"] = o.error_name;
    m["message"] = o.message;
  }
  io::write_text((fs::path(dir) / "manifest.json").string(), io::dump(m));
}

RunOutcome failure(const std::string& name, const std::string& msg, int code) {
  RunOutcome o;
  o.exit_code = code;
  o.status = "error";
  o.error_name = name;
  o.message = msg;
  return o;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"geometry",         "mz-scan",     "misfit-surface",
                                                 "well-report",      "stability-report", "instability",
                                                 "discrete-ansatz",  "relax",       "ergodic"};
  return names;
}

RunOutcome run_command(const std::string& command, const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  RunOutcome o;
  const auto it = handlers().find(command);
  if (it == handlers().end()) {
    o = failure("ConfigInvalid", "unknown command '" + command + "'", 2);
    write_manifest(out_dir, config_hash(cfg), command, o);
    return o;
  }
  std::vector<std::string> files;
  Output out(out_dir, files);
  try {
    it->second(cfg, out);
  } catch (const Error& e) {
    o = failure(e.name(), e.what(), e.exit_code());
  } catch (const std::exception& e) {
    o = failure("InternalError", e.what(), 3);
  }
  o.files = files;
  write_manifest(out_dir, config_hash(cfg), command, o);
  return o;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Twisted-bilayer relaxation and phonon-stability toolkit"};
  std::string config_path, out_dir, command;
  int threads = 1;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("--command", command, "one of: geometry, mz-scan, misfit-surface, well-report, "
                                       "stability-report, instability, discrete-ansatz, relax, ergodic")
      ->required();
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  set_thread_count(threads);

  RunConfig cfg;
  try {
    cfg = parse_config(io::read_text(config_path));
  } catch (const std::exception& e) {
    const Error* err = dynamic_cast<const Error*>(&e);
    const std::string name = err ? err->name() : "ConfigInvalid";
    std::cerr << "twistab: " << name << ": " << e.what() << "\n";
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      write_manifest(out_dir, "", command, failure(name, e.what(), 2));
    }
    return 2;
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  const RunOutcome o = run_command(command, cfg, cfg.output_dir);
  if (o.exit_code != 0) std::cerr << "twistab: " << o.error_name << ": " << o.message << "\n";
  return o.exit_code;
}

}  // namespace twistab
