#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "caginalp/cli.hpp"
#include "caginalp/errors.hpp"
#include "caginalp/galerkin.hpp"
#include "caginalp/io.hpp"
#include "caginalp/model.hpp"
#include "caginalp/pde.hpp"
#include "caginalp/potentials.hpp"
#include "caginalp/profile.hpp"
#include "caginalp/stefan.hpp"

namespace py = pybind11;
using namespace caginalp;

PYBIND11_MODULE(_caginalp, m) {
  m.doc() = "Caginalp-type phase-field solver";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<model::PhysicalParams>(m, "PhysicalParams")
      .def(py::init<>())
      .def_readwrite("rho", &model::PhysicalParams::rho)
      .def_readwrite("Te", &model::PhysicalParams::Te)
      .def_readwrite("dT", &model::PhysicalParams::dT)
      .def_readwrite("L", &model::PhysicalParams::L)
      .def_readwrite("h", &model::PhysicalParams::h)
      .def_readwrite("t0", &model::PhysicalParams::t0)
      .def_readwrite("sigma", &model::PhysicalParams::sigma)
      .def_readwrite("Le", &model::PhysicalParams::Le)
      .def_readwrite("C0", &model::PhysicalParams::C0)
      .def_readwrite("kappa0", &model::PhysicalParams::kappa0)
      .def_readwrite("k0", &model::PhysicalParams::k0);

  py::class_<model::NondimParams>(m, "NondimParams")
      .def(py::init<>())
      .def_readwrite("eps", &model::NondimParams::eps)
      .def_readwrite("Pe", &model::NondimParams::Pe)
      .def_readwrite("alpha", &model::NondimParams::alpha)
      .def_readwrite("theta", &model::NondimParams::theta)
      .def_readwrite("beta", &model::NondimParams::beta)
      .def_readwrite("St", &model::NondimParams::St);

  py::class_<model::HatParams>(m, "HatParams")
      .def(py::init<>())
      .def(py::init([](double alpha_hat, double beta_hat, double gamma, double delta, double eps,
                       double theta) {
             return model::HatParams{alpha_hat, beta_hat, gamma, delta, eps, theta};
           }),
           py::arg("alpha_hat") = 1.0, py::arg("beta_hat") = 1.0, py::arg("gamma") = 1.0,
           py::arg("delta") = 1.0, py::arg("eps") = 0.05, py::arg("theta") = 1.0)
      .def_readwrite("alpha_hat", &model::HatParams::alpha_hat)
      .def_readwrite("beta_hat", &model::HatParams::beta_hat)
      .def_readwrite("gamma", &model::HatParams::gamma)
      .def_readwrite("delta", &model::HatParams::delta)
      .def_readwrite("eps", &model::HatParams::eps)
      .def_readwrite("theta", &model::HatParams::theta)
      .def("__eq__", [](const model::HatParams& a, const model::HatParams& b) { return a == b; });

  py::class_<model::SharpScalings>(m, "SharpScalings")
      .def(py::init<>())
      .def_readwrite("alpha_bar", &model::SharpScalings::alpha_bar)
      .def_readwrite("beta_bar", &model::SharpScalings::beta_bar)
      .def_readwrite("gamma_bar", &model::SharpScalings::gamma_bar)
      .def_readwrite("delta_bar", &model::SharpScalings::delta_bar)
      .def_readwrite("eps", &model::SharpScalings::eps);

  m.def("nondimensionalize", &model::nondimensionalize);
  m.def("hat_params", &model::hat_params);
  m.def("sharp_scalings", &model::sharp_scalings);
  m.def("hat_from_sharp", &model::hat_from_sharp);

  py::class_<model::Potentials>(m, "Potentials")
      .def_static("standard", &model::Potentials::standard)
      .def_static("named", [](const std::string& W, const std::string& nu) {
        return model::Potentials::make(model::Potentials::named(W), model::Potentials::named(nu), W, nu);
      })
      .def("W", [](const model::Potentials& p, double x, int k) { return p.W.eval(x, k); },
           py::arg("x"), py::arg("derivative") = 0)
      .def("nu", [](const model::Potentials& p, double x, int k) { return p.nu.eval(x, k); },
           py::arg("x"), py::arg("derivative") = 0)
      .def("validate", &model::Potentials::validate);

  py::class_<Grid>(m, "Grid")
      .def_static("line", &Grid::line, py::arg("n"), py::arg("L") = 1.0)
      .def_static("rect", &Grid::rect, py::arg("nx"), py::arg("ny"), py::arg("Lx") = 1.0,
                  py::arg("Ly") = 1.0)
      .def_readonly("dim", &Grid::dim)
      .def_readonly("nx", &Grid::nx)
      .def_readonly("ny", &Grid::ny)
      .def_readonly("Lx", &Grid::Lx)
      .def_readonly("Ly", &Grid::Ly)
      .def("dx", &Grid::dx)
      .def("x", &Grid::x)
      .def("y", &Grid::y)
      .def("size", &Grid::size);

  py::class_<BoundarySpec>(m, "BoundarySpec")
      .def(py::init<>())
      .def_readwrite("q_b", &BoundarySpec::q_b)
      .def_readwrite("T_b", &BoundarySpec::T_b)
      .def_readwrite("gamma", &BoundarySpec::gamma)
      .def_readwrite("flux_override", &BoundarySpec::flux_override)
      .def_static("insulated", &BoundarySpec::insulated);

  py::class_<FieldState>(m, "FieldState")
      .def(py::init<>())
      .def(py::init([](std::vector<double> phi, std::vector<double> T, double time) {
             return FieldState{std::move(phi), std::move(T), time};
           }),
           py::arg("phi"), py::arg("T"), py::arg("time") = 0.0)
      .def_readwrite("phi", &FieldState::phi)
      .def_readwrite("T", &FieldState::T)
      .def_readwrite("time", &FieldState::time);
  m.def("make_state", &make_state);

  auto prof = m.def_submodule("profile");
  py::class_<profile::ProfileSolution>(prof, "ProfileSolution")
      .def_readonly("z", &profile::ProfileSolution::z)
      .def_readonly("phi0", &profile::ProfileSolution::phi0)
      .def_readonly("dphi0", &profile::ProfileSolution::dphi0)
      .def_readonly("weight", &profile::ProfileSolution::weight)
      .def_readonly("b", &profile::ProfileSolution::b)
      .def_readonly("orientation", &profile::ProfileSolution::orientation)
      .def_readonly("sigma0", &profile::ProfileSolution::sigma0)
      .def_readonly("sigma0_quadrature", &profile::ProfileSolution::sigma0_quadrature)
      .def_readonly("weight_norm", &profile::ProfileSolution::weight_norm);
  prof.def("solve_profile", &profile::solve_profile, py::arg("pot"), py::arg("half_width") = 20.0,
           py::arg("n_points") = 2048, py::arg("orientation") = 1);
  prof.def("surface_tension", &profile::surface_tension);
  prof.def("profile_value", &profile::profile_value);
  prof.def("first_integral_residual", &profile::first_integral_residual);

  py::class_<model::EnergyReport>(m, "EnergyReport")
      .def_readonly("E", &model::EnergyReport::E)
      .def_readonly("E0", &model::EnergyReport::E0)
      .def_readonly("E1", &model::EnergyReport::E1)
      .def_readonly("S", &model::EnergyReport::S);
  py::class_<model::EstimateConstants>(m, "EstimateConstants")
      .def_readonly("A", &model::EstimateConstants::A)
      .def_readonly("B", &model::EstimateConstants::B)
      .def_readonly("C", &model::EstimateConstants::C)
      .def_readonly("D", &model::EstimateConstants::D)
      .def_readonly("t_star_1", &model::EstimateConstants::t_star_1);
  m.def("estimate_constants",
        [](const model::HatParams& h, const model::Potentials& p, double L2, double H1,
           std::optional<double> E1_0) { return model::estimate_constants(h, p, {L2, H1}, E1_0); },
        py::arg("h"), py::arg("pot"), py::arg("lifting_L2") = 0.0, py::arg("lifting_H1") = 0.0,
        py::arg("E1_0") = py::none());

  auto pd = m.def_submodule("pde");
  py::enum_<pde::Scheme>(pd, "Scheme")
      .value("imex_euler", pde::Scheme::imex_euler)
      .value("imex_trapezoid", pde::Scheme::imex_trapezoid);
  py::enum_<pde::Mode>(pd, "Mode").value("full", pde::Mode::full).value("caginalp", pde::Mode::caginalp);
  py::class_<pde::DiagnosticsRecord>(pd, "DiagnosticsRecord")
      .def_readonly("time", &pde::DiagnosticsRecord::time)
      .def_readonly("energy", &pde::DiagnosticsRecord::energy)
      .def_readonly("energy_residual", &pde::DiagnosticsRecord::energy_residual)
      .def_readonly("entropy_prod_conduction", &pde::DiagnosticsRecord::entropy_prod_conduction)
      .def_readonly("entropy_prod_mobility", &pde::DiagnosticsRecord::entropy_prod_mobility)
      .def_readonly("caginalp_residual", &pde::DiagnosticsRecord::caginalp_residual);
  py::class_<pde::RunResult>(pd, "RunResult")
      .def_readonly("final_state", &pde::RunResult::final_state)
      .def_readonly("diagnostics", &pde::RunResult::diagnostics)
      .def_readonly("steps", &pde::RunResult::steps)
      .def_readonly("dt", &pde::RunResult::dt);
  pd.def("lifting_solution", &pde::lifting_solution);
  pd.def(
      "run",
      [](const FieldState& s, const Grid& g, const model::HatParams& h, const model::Potentials& p,
         const BoundarySpec& bc, double dt, double t_end, int diag_every, pde::Scheme scheme,
         pde::Mode mode) {
        pde::RunOptions o;
        o.dt = dt;
        o.t_end = t_end;
        o.diag_every = diag_every;
        o.step = {mode, scheme};
        py::gil_scoped_release release;
        return pde::run(s, g, h, p, bc, o);
      },
      py::arg("state"), py::arg("grid"), py::arg("h"), py::arg("pot"), py::arg("bc"),
      py::arg("dt") = 0.0, py::arg("t_end") = 0.0, py::arg("diag_every") = 1,
      py::arg("scheme") = pde::Scheme::imex_trapezoid, py::arg("mode") = pde::Mode::full);

  auto st = m.def_submodule("stefan");
  py::class_<stefan::TravelingWave>(st, "TravelingWave")
      .def_readonly("c", &stefan::TravelingWave::c)
      .def_readonly("T_front", &stefan::TravelingWave::T_front)
      .def_readonly("decay", &stefan::TravelingWave::decay);
  st.def("traveling_wave", &stefan::traveling_wave, py::arg("bars"), py::arg("theta"),
         py::arg("sigma0"), py::arg("T_inf"), py::arg("quadratic_coefficient"));
  st.def("locate_crossings", &stefan::locate_crossings);
  py::class_<stefan::Crossing>(st, "Crossing")
      .def_readonly("position", &stefan::Crossing::position)
      .def_readonly("orientation", &stefan::Crossing::orientation)
      .def_readonly("grazing", &stefan::Crossing::grazing);

  auto cl = m.def_submodule("cli");
  cl.def("emit_config", [](const std::string& text) { return cli::emit_config(cli::parse_config_text(text)); });
  cl.def("config_reference", &cli::config_reference);
  cl.def(
      "run_command",
      [](const std::string& text, const std::filesystem::path& out_dir, int jobs, bool seedless) {
        const cli::RunConfig cfg = cli::parse_config_text(text);
        cli::CommandOptions opt;
        opt.out_dir = out_dir;
        opt.jobs = jobs;
        opt.seedless = seedless;
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run_command(cfg, opt, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("config_text"), py::arg("out_dir"), py::arg("jobs") = 1, py::arg("seedless") = false);
}
