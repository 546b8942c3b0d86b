#include "fluxmech/model.hpp"

#include <cmath>

#include "fluxmech/bessel.hpp"

namespace fluxmech {

namespace {
constexpr double hbar_si = 1.054571817e-34; // J*s

bool finite(double v) { return std::isfinite(v); }
} // namespace

void DriveParams::validate() const {
    if (!finite(eps0_phi_e0) || !finite(eps0_phi_e1) || !finite(omega_drive) || !finite(delta_gap))
        throw config_error("DriveParams: non-finite field");
    if (omega_drive <= 0.0) throw config_error("DriveParams: omega_drive must be > 0");
    if (delta_gap < 0.0) throw config_error("DriveParams: delta_gap must be >= 0");
    if (n_photon < 0) throw config_error("DriveParams: n_photon must be >= 0");
}

void QubitParams::validate() const {
    if (!finite(gamma1) || !finite(gamma2) || !finite(sigma_z_eq))
        throw config_error("QubitParams: non-finite field");
    if (gamma1 < 0.0) throw config_error("QubitParams: gamma1 must be >= 0");
    if (gamma2 < 0.5 * gamma1) throw config_error("QubitParams: gamma2 must be >= gamma1/2");
    if (std::abs(sigma_z_eq) > 1.0) throw config_error("QubitParams: |sigma_z_eq| must be <= 1");
}

void MechanicalParams::validate() const {
    if (!finite(omega_m) || !finite(gamma_m) || !finite(g))
        throw config_error("MechanicalParams: non-finite field");
    if (omega_m <= 0.0) throw config_error("MechanicalParams: omega_m must be > 0");
    if (gamma_m < 0.0) throw config_error("MechanicalParams: gamma_m must be >= 0");
}

void PhysicalCouplingParams::validate() const {
    if (!(b_field > 0.0) || !(length_eff > 0.0) || !(i_cc > 0.0) || !(mass_eff > 0.0) ||
        !(omega_m > 0.0))
        throw config_error("PhysicalCouplingParams: all fields must be > 0");
}

void ModelConfig::validate() const {
    drive.validate();
    qubit.validate();
    mech.validate();
    if (!finite(unit_scale) || unit_scale <= 0.0)
        throw config_error("ModelConfig: unit_scale must be > 0");
}

std::pair<double, double> derive_rotating_frame(const DriveParams& drive) {
    drive.validate();
    const double delta = drive.eps0_phi_e0 - drive.n_photon * drive.omega_drive;
    const double delta_n =
        drive.delta_gap * bessel_jn(drive.n_photon, drive.eps0_phi_e1 / drive.omega_drive);
    return {delta, delta_n};
}

DerivedParams derive_secondary(double delta, double delta_n, const QubitParams& qubit,
                               const MechanicalParams& mech) {
    qubit.validate();
    mech.validate();
    if (delta == 0.0 && delta_n == 0.0)
        throw config_error("derive_secondary: degenerate parameters (delta, Delta_n) = (0, 0)");

    DerivedParams d;
    d.delta = delta;
    d.delta_n = delta_n;
    const double sgn = delta < 0.0 ? -1.0 : 1.0; // sign(0) := +1
    const double rabi2 = delta * delta + delta_n * delta_n;
    d.omega_rabi = sgn * std::sqrt(rabi2);
    d.gamma1n = (delta * delta * qubit.gamma1 + delta_n * delta_n * qubit.gamma2) / rabi2;
    d.gamma2n = qubit.gamma2 - (delta_n * delta_n / (2.0 * rabi2)) * (qubit.gamma2 - qubit.gamma1);
    // G and s_z_eq_bar vanish with gamma1 (the 0/0 at gamma1n = 0 resolves to 0).
    if (d.gamma1n == 0.0) {
        d.g_interaction = 0.0;
        d.s_z_eq_bar = 0.0;
    } else {
        const double rabi3 = d.omega_rabi * rabi2;
        d.g_interaction = -delta * qubit.gamma1 * delta_n * delta_n * qubit.sigma_z_eq * mech.g /
                          (2.0 * rabi3 * d.gamma1n);
        d.s_z_eq_bar =
            delta * qubit.gamma1 * qubit.sigma_z_eq / (std::abs(d.omega_rabi) * d.gamma1n);
    }
    d.sigma_detune = mech.omega_m - std::abs(d.omega_rabi);
    d.gamma1 = qubit.gamma1;
    d.gamma2 = qubit.gamma2;
    return d;
}

DerivedParams derive(const ModelConfig& cfg) {
    cfg.validate();
    const auto [delta, delta_n] = derive_rotating_frame(cfg.drive);
    return derive_secondary(delta, delta_n, cfg.qubit, cfg.mech);
}

double coupling_from_physical(const PhysicalCouplingParams& p) {
    p.validate();
    return p.b_field * p.length_eff * p.i_cc /
           std::sqrt(2.0 * hbar_si * p.mass_eff * p.omega_m);
}

EomParams make_eom_params(const ModelConfig& cfg) {
    cfg.validate();
    const auto [delta, delta_n] = derive_rotating_frame(cfg.drive);
    return {delta,
            delta_n,
            cfg.qubit.gamma1,
            cfg.qubit.gamma2,
            cfg.qubit.sigma_z_eq,
            cfg.mech.omega_m,
            cfg.mech.gamma_m,
            cfg.mech.g};
}

void eom_rhs(const std::array<double, 5>& y, std::array<double, 5>& dydt, const EomParams& p) {
    const double x = y[0], yy = y[1], sz = y[2], u = y[3], v = y[4];
    const double shift = p.delta + 2.0 * p.g * u; // detuning shifted by g(alpha + alpha*)
    dydt[0] = -p.gamma2 * x + shift * yy;
    dydt[1] = -p.gamma2 * yy - shift * x + 0.5 * p.delta_n * sz;
    dydt[2] = -p.gamma1 * (sz - p.sigma_z_eq) - 2.0 * p.delta_n * yy;
    dydt[3] = -0.5 * p.gamma_m * u + p.omega_m * v;
    dydt[4] = -0.5 * p.gamma_m * v - p.omega_m * u - 0.5 * p.g * sz;
}

SystemState eom_rhs(const SystemState& state, const EomParams& p) {
    std::array<double, 5> dydt;
    eom_rhs(state.to_array(), dydt, p);
    return SystemState::from_array(dydt);
}

void eom_jacobian(const std::array<double, 5>& y, std::array<std::array<double, 5>, 5>& jac,
                  const EomParams& p) {
    const double x = y[0], yy = y[1], u = y[3];
    const double shift = p.delta + 2.0 * p.g * u;
    jac = {};
    jac[0][0] = -p.gamma2;
    jac[0][1] = shift;
    jac[0][3] = 2.0 * p.g * yy;
    jac[1][0] = -shift;
    jac[1][1] = -p.gamma2;
    jac[1][2] = 0.5 * p.delta_n;
    jac[1][3] = -2.0 * p.g * x;
    jac[2][1] = -2.0 * p.delta_n;
    jac[2][2] = -p.gamma1;
    jac[3][3] = -0.5 * p.gamma_m;
    jac[3][4] = p.omega_m;
    jac[4][2] = -0.5 * p.g;
    jac[4][3] = -p.omega_m;
    jac[4][4] = -0.5 * p.gamma_m;
}

double bloch_norm(const SystemState& state) {
    return 4.0 * std::norm(state.s_minus) + state.s_z * state.s_z;
}

} // namespace fluxmech
