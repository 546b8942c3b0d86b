#pragma once

#include <array>
#include <utility>

#include "fluxmech/types.hpp"

namespace fluxmech {

/// Rotating-frame detuning and dressed gap:
/// delta = eps0_phi_e0 - n*omega_d, Delta_n = Delta * J_n(eps0_phi_e1/omega_d).
[[nodiscard]] std::pair<double, double> derive_rotating_frame(const DriveParams& drive);

/// Secondary quantities of the dressed qubit:
///   Omega_R = sign(delta)*sqrt(delta^2 + Delta_n^2),  sign(0) := +1
///   gamma1n = (delta^2 gamma1 + Delta_n^2 gamma2) / Omega_R^2
///   gamma2n = gamma2 - (Delta_n^2 / 2 Omega_R^2)(gamma2 - gamma1)
///   G       = -delta gamma1 Delta_n^2 sigma_z_eq g / (2 Omega_R^3 gamma1n)
///   s_z_eq_bar = delta gamma1 sigma_z_eq / (|Omega_R| gamma1n)
///   sigma   = omega_m - |Omega_R|
/// Requires (delta, Delta_n) != (0, 0).
[[nodiscard]] DerivedParams derive_secondary(double delta, double delta_n,
                                             const QubitParams& qubit,
                                             const MechanicalParams& mech);

/// Convenience: derive_rotating_frame + derive_secondary from a full config.
[[nodiscard]] DerivedParams derive(const ModelConfig& cfg);

/// Coupling from device geometry: g = B*l*I_cc*sqrt(1/(2*hbar*m*omega_m)),
/// in rad/s for SI inputs.
[[nodiscard]] double coupling_from_physical(const PhysicalCouplingParams& p);

/// Raw parameter pack of the equations of motion for a config.
[[nodiscard]] EomParams make_eom_params(const ModelConfig& cfg);

/// Right-hand side of the coupled semiclassical equations:
///   d s_-/dt   = -gamma2 s_- - i delta s_- + (i/2) Delta_n s_z - i g (alpha + alpha*) s_-
///   d s_z/dt   = -gamma1 (s_z - sigma_z_eq) + i Delta_n (s_- - s_+),  s_+ = conj(s_-)
///   d alpha/dt = -i omega_m alpha - (gamma_m/2) alpha - (i/2) g s_z
[[nodiscard]] SystemState eom_rhs(const SystemState& state, const EomParams& p);

/// Same RHS over the fixed real layout (Re s_-, Im s_-, s_z, Re alpha, Im alpha).
void eom_rhs(const std::array<double, 5>& y, std::array<double, 5>& dydt, const EomParams& p);

/// Analytic Jacobian of eom_rhs in the real layout, row-major J[i][j] = d f_i / d y_j.
void eom_jacobian(const std::array<double, 5>& y, std::array<std::array<double, 5>, 5>& jac,
                  const EomParams& p);

/// Conserved Bloch norm 4|s_-|^2 + s_z^2 (exact invariant at gamma1 = gamma2 = 0).
[[nodiscard]] double bloch_norm(const SystemState& state);

} // namespace fluxmech
