"""Semiclassical dynamics of a driven flux qubit coupled to a nanomechanical
oscillator: rotating-frame model derivations, adaptive integration of the
coupled Bloch-oscillator equations, the qubit response function with the
resulting mechanical damping/frequency renormalization, Hopf-threshold and
limit-cycle analysis, and flux-plane damping maps.
"""

from ._fluxmech import (
    BranchData,
    BranchPoint,
    ConfigError,
    DerivedParams,
    DriveParams,
    EomParams,
    EquilibriumPoint,
    FluxGridSpec,
    HopfPoint,
    IoError,
    LimitCycleMeasurement,
    LimitCyclePrediction,
    MapTile,
    MechanicalParams,
    ModelConfig,
    NumericError,
    OdeScheme,
    PhysicalCouplingParams,
    QubitParams,
    ResponseCurves,
    ResponsePoint,
    ResponseResult,
    ResponseSurface,
    StepStats,
    SteadyState,
    SteadyStateKind,
    SystemState,
    Trajectory,
    RingdownFit,
    __version__,
    bessel_jn,
    bloch_norm,
    chi_z,
    chi_z_numeric,
    chi_z_sas,
    continuation_sweep,
    coupling_from_physical,
    damping_map,
    default_sample_dt,
    derive,
    derive_rotating_frame,
    derive_secondary,
    eom_jacobian,
    eom_rhs,
    equilibrium_guess,
    find_equilibrium,
    g_crit_analytic,
    hopf_threshold,
    integrate,
    limit_cycle_measure,
    limit_cycle_prediction,
    make_eom_params,
    model_from_file,
    model_from_text,
    renormalized_mech,
    response_curves,
    response_surface,
    ringdown_fit,
    steady_state,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
