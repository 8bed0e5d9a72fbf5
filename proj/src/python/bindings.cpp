#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twistab/cli.hpp"
#include "twistab/config.hpp"
#include "twistab/errors.hpp"
#include "twistab/geometry.hpp"
#include "twistab/misfit.hpp"
#include "twistab/potentials.hpp"

namespace py = pybind11;
using namespace twistab;

namespace {

PairPotential preset(const std::string& kind, double height) {
  if (kind == "lennard_jones") return presets::lennard_jones_bg(height);
  if (kind == "morse") return presets::morse_bg(height);
  if (kind == "kolmogorov_crespi") return presets::kolmogorov_crespi_bg(height);
  if (kind == "product_morse_lj") return presets::product_morse_lj_bg(height);
  throw InvalidParameter("unknown potential kind '" + kind + "'");
}

double radians(double deg) { return deg * kPi / 180.0; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Twisted-bilayer geometry, interlayer potentials and stability diagnostics";
  m.attr("__version__") = kVersion;

  static py::exception<Error> err(m, "TwistabError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(err, (e.name() + ": " + e.what()).c_str());
    }
  });

  m.def(
      "geometry",
      [](double twist_deg, double lattice_constant) {
        const BilayerGeometry g = build_twisted_pair(graphene_basis(lattice_constant), radians(twist_deg));
        py::dict d;
        d["a1"] = g.a1;
        d["a2"] = g.a2;
        d["a_moire"] = g.a_moire;
        d["b_moire"] = g.b_moire;
        d["d12"] = g.d12;
        d["d21"] = g.d21;
        d["cell_area_moire"] = g.cell_area_moire;
        d["moire_constant"] = moire_constant(g);
        return d;
      },
      py::arg("twist_deg"), py::arg("lattice_constant") = 2.46);

  m.def(
      "m_closed", [](const std::string& kind, double z) { return m_closed(preset(kind, z), z); }, py::arg("kind"),
      py::arg("z"));
  m.def(
      "m_quadrature", [](const std::string& kind, double z) { return m_quadrature(preset(kind, z), z); },
      py::arg("kind"), py::arg("z"));
  m.def(
      "sign_transition",
      [](const std::string& kind, double lo, double hi, bool closed) {
        return sign_transition(preset(kind, 3.35), lo, hi, closed ? MzMethod::closed : MzMethod::quadrature);
      },
      py::arg("kind"), py::arg("lo"), py::arg("hi"), py::arg("closed") = true);
  m.def(
      "hessian3d", [](const std::string& kind, const Vec2& x, double z) { return hessian3d(preset(kind, z), x, z); },
      py::arg("kind"), py::arg("x"), py::arg("z"));

  m.def(
      "gsfe_value", [](const Vec2& x) { return misfit_value(MisfitSurface::gsfe(), x); }, py::arg("x"));
  m.def("gsfe_hessian", [](const Vec2& x) { return misfit_grad_hessian(MisfitSurface::gsfe(), x).hess; },
        py::arg("x"));
  m.def(
      "well_report",
      [](const std::string& kind, const std::vector<int>& n_list) {
        const WellReport r = well_report(graphene_basis(), preset(kind, 3.35), n_list);
        std::vector<std::tuple<int, double, double>> rows;
        for (const auto& w : r.rows) rows.emplace_back(w.n, w.min_eig_ab, w.min_eig_ba);
        return py::make_tuple(rows, r.stable, r.cauchy);
      },
      py::arg("kind"), py::arg("n_list") = std::vector<int>{2, 4, 6, 8, 10});

  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("config_json"));
  m.def(
      "run",
      [](const std::string& command, const std::string& config_json, const std::string& out_dir) {
        RunOutcome o;
        {
          py::gil_scoped_release release;
          o = run_command(command, parse_config(config_json), out_dir);
        }
        py::dict d;
        d["exit_code"] = o.exit_code;
        d["status"] = o.status;
        d["error"] = o.error_name;
        d["message"] = o.message;
        d["files"] = o.files;
        return d;
      },
      py::arg("command"), py::arg("config_json"), py::arg("out_dir"));
  m.def("commands", &command_names);
}
