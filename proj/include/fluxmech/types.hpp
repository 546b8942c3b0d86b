#pragma once

#include <array>
#include <complex>

#include "fluxmech/errors.hpp"

namespace fluxmech {

using complexd = std::complex<double>;

/// Flux drive of the qubit. All frequencies are angular, expressed in a single
/// global unit (omega_drive = 1 by convention unless the caller rescales).
struct DriveParams {
    double eps0_phi_e0 = 0.0; ///< DC flux bias energy, eps0*phi_e0/hbar
    double eps0_phi_e1 = 0.0; ///< drive amplitude, eps0*phi_e1/hbar
    double omega_drive = 1.0; ///< drive angular frequency omega_d
    int n_photon = 0;         ///< multi-photon resonance index n
    double delta_gap = 0.0;   ///< qubit gap Delta at the degeneracy point

    void validate() const;
};

/// Qubit dissipation channels and its thermal-equilibrium inversion.
struct QubitParams {
    double gamma1 = 0.0;      ///< thermal relaxation rate gamma_1
    double gamma2 = 0.0;      ///< transverse decay rate gamma_2 >= gamma_1/2
    double sigma_z_eq = -1.0; ///< equilibrium value of s_z, in [-1, 1]

    void validate() const;
};

/// Mechanical mode parameters.
struct MechanicalParams {
    double omega_m = 1.0; ///< mechanical angular frequency
    double gamma_m = 0.0; ///< mechanical energy decay rate
    double g = 0.0;       ///< qubit-oscillator coupling (may be negative)

    void validate() const;
};

/// SI inputs for deriving the coupling g from device geometry.
struct PhysicalCouplingParams {
    double b_field = 0.0;    ///< applied magnetic field [T]
    double length_eff = 0.0; ///< effective beam length [m]
    double i_cc = 0.0;       ///< circulating current magnitude [A]
    double mass_eff = 0.0;   ///< effective beam mass [kg]
    double omega_m = 0.0;    ///< mechanical angular frequency [rad/s]

    void validate() const;
};

/// Rotating-frame and secondary quantities consumed by the analytic formulas.
/// Carries the bare decay rates alongside the dressed ones: the inversion
/// from (gamma1n, gamma2n) back to (gamma1, gamma2) is singular at
/// delta^2 = Delta_n^2/2, and the response numerator needs the bare rate.
struct DerivedParams {
    double delta = 0.0;         ///< detuning delta
    double delta_n = 0.0;       ///< dressed gap Delta_n
    double omega_rabi = 0.0;    ///< signed Rabi frequency Omega_R
    double gamma1n = 0.0;       ///< dressed longitudinal rate gamma_1n
    double gamma2n = 0.0;       ///< dressed transverse rate gamma_2n
    double g_interaction = 0.0; ///< interaction coefficient G
    double s_z_eq_bar = 0.0;    ///< diagonal-basis equilibrium inversion
    double sigma_detune = 0.0;  ///< sigma = omega_m - |Omega_R|
    double gamma1 = 0.0;        ///< bare longitudinal rate (copied from input)
    double gamma2 = 0.0;        ///< bare transverse rate (copied from input)
};

/// The five real dynamical degrees of freedom of the coupled system.
/// Real layout is fixed as (Re s_-, Im s_-, s_z, Re alpha, Im alpha).
struct SystemState {
    complexd s_minus{0.0, 0.0};
    double s_z = 0.0;
    complexd alpha{0.0, 0.0};

    [[nodiscard]] std::array<double, 5> to_array() const {
        return {s_minus.real(), s_minus.imag(), s_z, alpha.real(), alpha.imag()};
    }
    [[nodiscard]] static SystemState from_array(const std::array<double, 5>& y) {
        return {{y[0], y[1]}, y[2], {y[3], y[4]}};
    }
};

/// Minimal parameter pack appearing in the equations of motion.
struct EomParams {
    double delta = 0.0;
    double delta_n = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double sigma_z_eq = -1.0;
    double omega_m = 1.0;
    double gamma_m = 0.0;
    double g = 0.0;
};

/// Full model description: drive, qubit, mechanics, and the unit scale.
/// All rates/frequencies are multiples of unit_scale (default: omega_d = 1).
struct ModelConfig {
    DriveParams drive;
    QubitParams qubit;
    MechanicalParams mech;
    double unit_scale = 1.0;

    void validate() const;
};

} // namespace fluxmech
