#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

// Python face of the toolbox. Exposes the parameter structs, the model
// derivations, the integrator and steady-state machinery, the response
// formulas, the bifurcation analysis, and the flux-plane maps. Trajectories
// and map tiles convert to numpy arrays; everything else maps 1:1 onto the
// C++ structs.

#include <array>
#include <complex>
#include <cstring>
#include <vector>

#include "fluxmech/bessel.hpp"
#include "fluxmech/bifurcation.hpp"
#include "fluxmech/config.hpp"
#include "fluxmech/dynamics.hpp"
#include "fluxmech/errors.hpp"
#include "fluxmech/manifest.hpp"
#include "fluxmech/maps.hpp"
#include "fluxmech/model.hpp"
#include "fluxmech/response.hpp"
#include "fluxmech/types.hpp"

namespace py = pybind11;
using namespace fluxmech;

namespace {

py::array_t<double> states_matrix(const Trajectory& traj) {
  const py::ssize_t n = static_cast<py::ssize_t>(traj.states.size());
  py::array_t<double> out({n, static_cast<py::ssize_t>(5)});
  auto view = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < n; ++i) {
    const std::array<double, 5> y = traj.states[static_cast<std::size_t>(i)].to_array();
    for (py::ssize_t j = 0; j < 5; ++j) view(i, j) = y[static_cast<std::size_t>(j)];
  }
  return out;
}

py::array_t<double> vector_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

py::array_t<double> tile_matrix(const MapTile& tile) {
  const py::ssize_t ny = static_cast<py::ssize_t>(tile.y.size());
  const py::ssize_t nx = static_cast<py::ssize_t>(tile.x.size());
  py::array_t<double> out({ny, nx});
  std::memcpy(out.mutable_data(), tile.values.data(),
              tile.values.size() * sizeof(double));
  return out;
}

std::array<double, 5> as_array5(const py::array_t<double>& y) {
  if (y.ndim() != 1 || y.shape(0) != 5)
    throw py::value_error("state array must have shape (5,)");
  std::array<double, 5> out{};
  auto view = y.unchecked<1>();
  for (py::ssize_t i = 0; i < 5; ++i) out[static_cast<std::size_t>(i)] = view(i);
  return out;
}

} // namespace

PYBIND11_MODULE(_fluxmech, m) {
  m.doc() = "Semiclassical dynamics of a driven flux qubit coupled to a "
            "nanomechanical oscillator";
  m.attr("__version__") = kVersion;

  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<io_error>(m, "IoError", PyExc_OSError);

  // ---- parameter structs ----

  py::class_<DriveParams>(m, "DriveParams")
      .def(py::init<>())
      .def(py::init([](double eps0_phi_e0, double eps0_phi_e1, double omega_drive,
                       int n_photon, double delta_gap) {
             return DriveParams{eps0_phi_e0, eps0_phi_e1, omega_drive, n_photon,
                                delta_gap};
           }),
           py::arg("eps0_phi_e0") = 0.0, py::arg("eps0_phi_e1") = 0.0,
           py::arg("omega_drive") = 1.0, py::arg("n_photon") = 0,
           py::arg("delta_gap") = 0.0)
      .def_readwrite("eps0_phi_e0", &DriveParams::eps0_phi_e0)
      .def_readwrite("eps0_phi_e1", &DriveParams::eps0_phi_e1)
      .def_readwrite("omega_drive", &DriveParams::omega_drive)
      .def_readwrite("n_photon", &DriveParams::n_photon)
      .def_readwrite("delta_gap", &DriveParams::delta_gap)
      .def("validate", &DriveParams::validate);

  py::class_<QubitParams>(m, "QubitParams")
      .def(py::init<>())
      .def(py::init([](double gamma1, double gamma2, double sigma_z_eq) {
             return QubitParams{gamma1, gamma2, sigma_z_eq};
           }),
           py::arg("gamma1") = 0.0, py::arg("gamma2") = 0.0,
           py::arg("sigma_z_eq") = -1.0)
      .def_readwrite("gamma1", &QubitParams::gamma1)
      .def_readwrite("gamma2", &QubitParams::gamma2)
      .def_readwrite("sigma_z_eq", &QubitParams::sigma_z_eq)
      .def("validate", &QubitParams::validate);

  py::class_<MechanicalParams>(m, "MechanicalParams")
      .def(py::init<>())
      .def(py::init([](double omega_m, double gamma_m, double g) {
             return MechanicalParams{omega_m, gamma_m, g};
           }),
           py::arg("omega_m") = 1.0, py::arg("gamma_m") = 0.0, py::arg("g") = 0.0)
      .def_readwrite("omega_m", &MechanicalParams::omega_m)
      .def_readwrite("gamma_m", &MechanicalParams::gamma_m)
      .def_readwrite("g", &MechanicalParams::g)
      .def("validate", &MechanicalParams::validate);

  py::class_<PhysicalCouplingParams>(m, "PhysicalCouplingParams")
      .def(py::init<>())
      .def(py::init([](double b_field, double length_eff, double i_cc,
                       double mass_eff, double omega_m) {
             return PhysicalCouplingParams{b_field, length_eff, i_cc, mass_eff,
                                           omega_m};
           }),
           py::arg("b_field"), py::arg("length_eff"), py::arg("i_cc"),
           py::arg("mass_eff"), py::arg("omega_m"))
      .def_readwrite("b_field", &PhysicalCouplingParams::b_field)
      .def_readwrite("length_eff", &PhysicalCouplingParams::length_eff)
      .def_readwrite("i_cc", &PhysicalCouplingParams::i_cc)
      .def_readwrite("mass_eff", &PhysicalCouplingParams::mass_eff)
      .def_readwrite("omega_m", &PhysicalCouplingParams::omega_m)
      .def("validate", &PhysicalCouplingParams::validate);

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def(py::init([](DriveParams drive, QubitParams qubit, MechanicalParams mech,
                       double unit_scale) {
             return ModelConfig{drive, qubit, mech, unit_scale};
           }),
           py::arg("drive"), py::arg("qubit"), py::arg("mech"),
           py::arg("unit_scale") = 1.0)
      .def_readwrite("drive", &ModelConfig::drive)
      .def_readwrite("qubit", &ModelConfig::qubit)
      .def_readwrite("mech", &ModelConfig::mech)
      .def_readwrite("unit_scale", &ModelConfig::unit_scale)
      .def("validate", &ModelConfig::validate);

  py::class_<DerivedParams>(m, "DerivedParams")
      .def(py::init<>())
      .def_readwrite("delta", &DerivedParams::delta)
      .def_readwrite("delta_n", &DerivedParams::delta_n)
      .def_readwrite("omega_rabi", &DerivedParams::omega_rabi)
      .def_readwrite("gamma1n", &DerivedParams::gamma1n)
      .def_readwrite("gamma2n", &DerivedParams::gamma2n)
      .def_readwrite("g_interaction", &DerivedParams::g_interaction)
      .def_readwrite("s_z_eq_bar", &DerivedParams::s_z_eq_bar)
      .def_readwrite("sigma_detune", &DerivedParams::sigma_detune)
      .def_readwrite("gamma1", &DerivedParams::gamma1)
      .def_readwrite("gamma2", &DerivedParams::gamma2);

  py::class_<EomParams>(m, "EomParams")
      .def(py::init<>())
      .def(py::init([](double delta, double delta_n, double gamma1, double gamma2,
                       double sigma_z_eq, double omega_m, double gamma_m, double g) {
             return EomParams{delta,      delta_n, gamma1,  gamma2,
                              sigma_z_eq, omega_m, gamma_m, g};
           }),
           py::arg("delta"), py::arg("delta_n"), py::arg("gamma1"),
           py::arg("gamma2"), py::arg("sigma_z_eq") = -1.0, py::arg("omega_m") = 1.0,
           py::arg("gamma_m") = 0.0, py::arg("g") = 0.0)
      .def_readwrite("delta", &EomParams::delta)
      .def_readwrite("delta_n", &EomParams::delta_n)
      .def_readwrite("gamma1", &EomParams::gamma1)
      .def_readwrite("gamma2", &EomParams::gamma2)
      .def_readwrite("sigma_z_eq", &EomParams::sigma_z_eq)
      .def_readwrite("omega_m", &EomParams::omega_m)
      .def_readwrite("gamma_m", &EomParams::gamma_m)
      .def_readwrite("g", &EomParams::g);

  py::class_<SystemState>(m, "SystemState")
      .def(py::init<>())
      .def(py::init([](complexd s_minus, double s_z, complexd alpha) {
             return SystemState{s_minus, s_z, alpha};
           }),
           py::arg("s_minus") = complexd{0.0, 0.0}, py::arg("s_z") = 0.0,
           py::arg("alpha") = complexd{0.0, 0.0})
      .def_readwrite("s_minus", &SystemState::s_minus)
      .def_readwrite("s_z", &SystemState::s_z)
      .def_readwrite("alpha", &SystemState::alpha)
      .def("to_array",
           [](const SystemState& s) {
             py::array_t<double> out(5);
             const std::array<double, 5> y = s.to_array();
             std::memcpy(out.mutable_data(), y.data(), sizeof(y));
             return out;
           })
      .def_static("from_array", [](const py::array_t<double>& y) {
        return SystemState::from_array(as_array5(y));
      });

  // ---- model derivations ----

  m.def("bessel_jn", &bessel_jn, py::arg("n"), py::arg("x"),
        "Bessel function of the first kind J_n(x)");
  m.def("derive_rotating_frame", &derive_rotating_frame, py::arg("drive"),
        "(delta, delta_n) of the rotating-frame model for a given drive");
  m.def("derive_secondary", &derive_secondary, py::arg("delta"), py::arg("delta_n"),
        py::arg("qubit"), py::arg("mech"),
        "Dressed rates, Rabi frequency, interaction coefficient, and detuning");
  m.def("derive", &derive, py::arg("config"),
        "All derived quantities for a full model configuration");
  m.def("coupling_from_physical", &coupling_from_physical, py::arg("params"),
        "Coupling rate g from device geometry (SI inputs)");
  m.def("make_eom_params", &make_eom_params, py::arg("config"),
        "Equation-of-motion parameter pack for a model configuration");
  m.def("bloch_norm", &bloch_norm, py::arg("state"),
        "Conserved 4|s_-|^2 + s_z^2 when both qubit decays vanish");
  m.def(
      "eom_rhs",
      [](const py::array_t<double>& y, const EomParams& p) {
        std::array<double, 5> dydt{};
        eom_rhs(as_array5(y), dydt, p);
        py::array_t<double> out(5);
        std::memcpy(out.mutable_data(), dydt.data(), sizeof(dydt));
        return out;
      },
      py::arg("y"), py::arg("params"),
      "Time derivative of the 5-component real state vector");
  m.def(
      "eom_jacobian",
      [](const py::array_t<double>& y, const EomParams& p) {
        std::array<std::array<double, 5>, 5> jac{};
        eom_jacobian(as_array5(y), jac, p);
        py::array_t<double> out({static_cast<py::ssize_t>(5), static_cast<py::ssize_t>(5)});
        auto view = out.mutable_unchecked<2>();
        for (int i = 0; i < 5; ++i)
          for (int j = 0; j < 5; ++j)
            view(i, j) = jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        return out;
      },
      py::arg("y"), py::arg("params"), "Analytic Jacobian of the equations of motion");

  // ---- integration and steady states ----

  py::enum_<OdeScheme>(m, "OdeScheme")
      .value("rk45", OdeScheme::rk45)
      .value("rk853", OdeScheme::rk853);

  py::class_<StepStats>(m, "StepStats")
      .def_readonly("n_accepted", &StepStats::n_accepted)
      .def_readonly("n_rejected", &StepStats::n_rejected)
      .def_readonly("n_rhs_evals", &StepStats::n_rhs_evals)
      .def_readonly("rel_tol", &StepStats::rel_tol)
      .def_readonly("abs_tol", &StepStats::abs_tol);

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("times",
                             [](const Trajectory& t) { return vector_array(t.times); })
      .def_property_readonly("states", &states_matrix,
                             "(n, 5) array of (Re s_-, Im s_-, s_z, Re a, Im a)")
      .def_readonly("stats", &Trajectory::stats)
      .def("final_state", [](const Trajectory& t) {
        if (t.states.empty()) throw py::value_error("empty trajectory");
        return t.states.back();
      });

  py::class_<RingdownFit>(m, "RingdownFit")
      .def_readonly("gamma_eff", &RingdownFit::gamma_eff)
      .def_readonly("omega_eff", &RingdownFit::omega_eff)
      .def_readonly("residual", &RingdownFit::residual);

  py::class_<LimitCycleMeasurement>(m, "LimitCycleMeasurement")
      .def_readonly("amp_alpha", &LimitCycleMeasurement::amp_alpha)
      .def_readonly("amp_s_minus", &LimitCycleMeasurement::amp_s_minus)
      .def_readonly("mean_s_z", &LimitCycleMeasurement::mean_s_z)
      .def_readonly("freq", &LimitCycleMeasurement::freq)
      .def_readonly("converged", &LimitCycleMeasurement::converged);

  py::enum_<SteadyStateKind>(m, "SteadyStateKind")
      .value("fixed_point", SteadyStateKind::fixed_point)
      .value("limit_cycle", SteadyStateKind::limit_cycle)
      .value("undetermined", SteadyStateKind::undetermined);

  py::class_<SteadyState>(m, "SteadyState")
      .def_readonly("kind", &SteadyState::kind)
      .def_readonly("state", &SteadyState::state)
      .def_readonly("cycle", &SteadyState::cycle)
      .def_readonly("t_elapsed", &SteadyState::t_elapsed);

  m.def("default_sample_dt", &default_sample_dt, py::arg("params"),
        "Sampling interval resolving both omega_m and the Rabi frequency");
  m.def("integrate", &integrate, py::arg("state0"), py::arg("params"), py::arg("t0"),
        py::arg("t1"), py::arg("rel_tol") = 1e-10, py::arg("abs_tol") = 1e-12,
        py::arg("sample_dt") = 0.0, py::arg("scheme") = OdeScheme::rk853,
        "Adaptive integration with dense-output sampling",
        py::call_guard<py::gil_scoped_release>());
  m.def("ringdown_fit", &ringdown_fit, py::arg("trajectory"),
        "Fit decay rate and frequency of a free ring-down");
  m.def("limit_cycle_measure", &limit_cycle_measure, py::arg("trajectory"),
        py::arg("transient_fraction") = 0.5,
        "Amplitude, mean inversion, and frequency of a steady oscillation");
  m.def("steady_state", &steady_state, py::arg("params"), py::arg("state0"),
        py::arg("t_budget"), py::arg("rel_tol") = 1e-10, py::arg("abs_tol") = 1e-12,
        "Classify the long-time attractor within an integration budget",
        py::call_guard<py::gil_scoped_release>());

  // ---- response ----

  py::class_<ResponseResult>(m, "ResponseResult")
      .def_readonly("chi", &ResponseResult::chi)
      .def_readonly("gamma_m_tilde", &ResponseResult::gamma_m_tilde)
      .def_readonly("omega_m_tilde", &ResponseResult::omega_m_tilde);

  py::class_<ResponsePoint>(m, "ResponsePoint")
      .def_readonly("omega", &ResponsePoint::omega)
      .def_readonly("re_chi", &ResponsePoint::re_chi)
      .def_readonly("im_chi", &ResponsePoint::im_chi);

  py::class_<ResponseCurves>(m, "ResponseCurves")
      .def_readonly("points", &ResponseCurves::points)
      .def_property_readonly("peak_omegas", [](const ResponseCurves& c) {
        return vector_array(c.peak_omegas);
      });

  m.def("chi_z", &chi_z, py::arg("omega"), py::arg("derived"),
        "Closed-form inversion response chi_z(-i omega)");
  m.def("chi_z_sas", &chi_z_sas, py::arg("omega"), py::arg("derived"),
        "Two-Lorentzian sideband approximation of chi_z");
  m.def("renormalized_mech", &renormalized_mech, py::arg("derived"), py::arg("mech"),
        "chi_z at omega_m and the renormalized damping/frequency");
  m.def("chi_z_numeric", &chi_z_numeric, py::arg("omega"), py::arg("params"),
        py::arg("alpha0") = 0.0, py::arg("cycles") = 0,
        "chi_z measured from driven Bloch dynamics (independent of the formula)",
        py::call_guard<py::gil_scoped_release>());
  m.def("response_curves", &response_curves, py::arg("omega_grid"), py::arg("derived"),
        "Tabulated chi_z with interior |Im chi| peak locations");

  // ---- bifurcation ----

  py::class_<EquilibriumPoint>(m, "EquilibriumPoint")
      .def_readonly("state", &EquilibriumPoint::state)
      .def_readonly("residual_norm", &EquilibriumPoint::residual_norm)
      .def_property_readonly("eigenvalues",
                             [](const EquilibriumPoint& e) {
                               py::array_t<complexd> out(5);
                               std::memcpy(out.mutable_data(), e.eigenvalues.data(),
                                           5 * sizeof(complexd));
                               return out;
                             })
      .def_readonly("stable", &EquilibriumPoint::stable);

  py::class_<LimitCyclePrediction>(m, "LimitCyclePrediction")
      .def_readonly("g_crit", &LimitCyclePrediction::g_crit)
      .def_readonly("r_s", &LimitCyclePrediction::r_s)
      .def_readonly("r_a", &LimitCyclePrediction::r_a)
      .def_readonly("s_cz", &LimitCyclePrediction::s_cz)
      .def_readonly("omega_a", &LimitCyclePrediction::omega_a)
      .def_readonly("f_sigma", &LimitCyclePrediction::f_sigma)
      .def_readonly("below_threshold", &LimitCyclePrediction::below_threshold);

  py::class_<HopfPoint>(m, "HopfPoint")
      .def_readonly("g", &HopfPoint::g)
      .def_readonly("frequency", &HopfPoint::frequency);

  py::class_<BranchPoint>(m, "BranchPoint")
      .def_readonly("g", &BranchPoint::g)
      .def_readonly("eq", &BranchPoint::eq)
      .def_readonly("has_cycle", &BranchPoint::has_cycle)
      .def_readonly("cycle", &BranchPoint::cycle)
      .def_property_readonly("cycle_max",
                             [](const BranchPoint& b) {
                               py::array_t<double> out(5);
                               std::memcpy(out.mutable_data(), b.cycle_max.data(),
                                           sizeof(b.cycle_max));
                               return out;
                             })
      .def_property_readonly("cycle_min",
                             [](const BranchPoint& b) {
                               py::array_t<double> out(5);
                               std::memcpy(out.mutable_data(), b.cycle_min.data(),
                                           sizeof(b.cycle_min));
                               return out;
                             })
      .def_readonly("max_abs_alpha", &BranchPoint::max_abs_alpha)
      .def_readonly("min_abs_alpha", &BranchPoint::min_abs_alpha);

  py::class_<BranchData>(m, "BranchData")
      .def_readonly("points", &BranchData::points)
      .def_readonly("truncated", &BranchData::truncated)
      .def_readonly("diagnostic", &BranchData::diagnostic);

  m.def("equilibrium_guess", &equilibrium_guess, py::arg("params"),
        "Decoupled-limit starting point for the equilibrium Newton solve");
  m.def("find_equilibrium", &find_equilibrium, py::arg("params"), py::arg("guess"),
        "Damped Newton solve with eigenvalues and stability attached");
  m.def("hopf_threshold", &hopf_threshold, py::arg("base"), py::arg("g_lo"),
        py::arg("g_hi"), py::arg("guess"),
        "Coupling where the equilibrium loses stability, with the crossing "
        "frequency",
        py::call_guard<py::gil_scoped_release>());
  m.def("g_crit_analytic", &g_crit_analytic, py::arg("derived"), py::arg("mech"),
        "Closed-form critical coupling");
  m.def("limit_cycle_prediction", &limit_cycle_prediction, py::arg("derived"),
        py::arg("mech"), py::arg("g"),
        "Closed-form cycle amplitudes, inversion shift, and frequency offset");
  m.def("continuation_sweep", &continuation_sweep, py::arg("base"), py::arg("g_grid"),
        py::arg("guess"), py::arg("cycle_budget") = 0.0,
        "Equilibrium branch over a coupling grid with simulated cycles",
        py::call_guard<py::gil_scoped_release>());

  // ---- flux-plane maps ----

  py::class_<FluxGridSpec>(m, "FluxGridSpec")
      .def(py::init<>())
      .def(py::init([](double phi_e0_min, double phi_e0_max, int phi_e0_count,
                       double phi_e1_min, double phi_e1_max, int phi_e1_count,
                       int n_max) {
             return FluxGridSpec{phi_e0_min,  phi_e0_max,  phi_e0_count, phi_e1_min,
                                 phi_e1_max,  phi_e1_count, n_max};
           }),
           py::arg("phi_e0_min"), py::arg("phi_e0_max"), py::arg("phi_e0_count"),
           py::arg("phi_e1_min"), py::arg("phi_e1_max"), py::arg("phi_e1_count"),
           py::arg("n_max") = 0)
      .def_readwrite("phi_e0_min", &FluxGridSpec::phi_e0_min)
      .def_readwrite("phi_e0_max", &FluxGridSpec::phi_e0_max)
      .def_readwrite("phi_e0_count", &FluxGridSpec::phi_e0_count)
      .def_readwrite("phi_e1_min", &FluxGridSpec::phi_e1_min)
      .def_readwrite("phi_e1_max", &FluxGridSpec::phi_e1_max)
      .def_readwrite("phi_e1_count", &FluxGridSpec::phi_e1_count)
      .def_readwrite("n_max", &FluxGridSpec::n_max)
      .def("validate", &FluxGridSpec::validate);

  py::class_<MapTile>(m, "MapTile")
      .def_property_readonly("x", [](const MapTile& t) { return vector_array(t.x); })
      .def_property_readonly("y", [](const MapTile& t) { return vector_array(t.y); })
      .def_property_readonly("values", &tile_matrix,
                             "(len(y), len(x)) array, row iy is constant y")
      .def_readonly("x_label", &MapTile::x_label)
      .def_readonly("y_label", &MapTile::y_label)
      .def_readonly("value_label", &MapTile::value_label)
      .def_readonly("min_value", &MapTile::min_value)
      .def_readonly("max_value", &MapTile::max_value);

  py::class_<ResponseSurface>(m, "ResponseSurface")
      .def_readonly("abs_chi", &ResponseSurface::abs_chi)
      .def_readonly("arg_chi", &ResponseSurface::arg_chi)
      .def_readonly("im_chi", &ResponseSurface::im_chi);

  m.def("damping_map", &damping_map, py::arg("spec"), py::arg("base"),
        "Mechanical damping correction over the flux-bias plane",
        py::call_guard<py::gil_scoped_release>());
  m.def("response_surface", &response_surface, py::arg("delta_grid"),
        py::arg("omega_grid"), py::arg("delta_n"), py::arg("qubit"), py::arg("mech"),
        "abs/arg/Im of chi_z over a (delta, omega) grid",
        py::call_guard<py::gil_scoped_release>());

  // ---- config files ----

  m.def(
      "model_from_text",
      [](const std::string& text, const std::string& source) {
        return model_from_config(ParsedConfig::from_text(text, source));
      },
      py::arg("text"), py::arg("source") = std::string("<python>"),
      "Parse the CLI config format into a ModelConfig");
  m.def(
      "model_from_file",
      [](const std::string& path) {
        return model_from_config(ParsedConfig::from_file(path));
      },
      py::arg("path"), "Load a CLI config file into a ModelConfig");
}
