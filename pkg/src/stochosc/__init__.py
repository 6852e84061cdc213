"""Stochastic second-order oscillators: phase-space models, non-explosion
certificates, coordinate shears, and Euler-Maruyama simulation."""

from .poly import MultiPolynomial, Polynomial
from .system import (
    ConstantMatrix,
    GeneralDrift,
    LienardForm,
    OscillatorModel,
    PhasePoint,
    PhaseSystem,
    StateDependent,
    reduce_to_phase_system,
)
from .catalog import (
    CATALOG,
    ModelCatalogEntry,
    build_coupled_lienard,
    build_duffing,
    build_duffing_vdp_general,
    build_linear_oscillator,
    build_model,
    build_van_der_pol,
    build_vector_duffing,
)
from .generator import GeneratorOperator, apply_generator, finite_difference_generator
from .transform import TransformedSystem, build_transformed_system, phi_forward, phi_inverse
from .lyapunov import (
    DEFAULT_DOMAIN,
    ROUTE_DAMPING,
    ROUTE_ORDER,
    ROUTE_SCALAR,
    ROUTE_TRACE,
    ROUTE_VECTOR,
    ConditionResult,
    LyapunovCertificate,
    LyapunovFunction,
    VerificationDomain,
    build_energy_lyapunov,
    build_transformed_lyapunov_scalar,
    build_transformed_lyapunov_vector,
    check_damping_bound,
    check_scalar_transformed_conditions,
    check_trace_bound,
    check_vector_transformed_conditions,
    verify_nonexplosion,
)
from .integrate import (
    EnsembleResult,
    IntegrationConfig,
    StrongOrderResult,
    Trajectory,
    em_step,
    estimate_strong_order,
    simulate_ensemble,
    simulate_path,
    wiener_increments,
)

__version__ = "0.1.0"

__all__ = [
    "MultiPolynomial",
    "Polynomial",
    "ConstantMatrix",
    "GeneralDrift",
    "LienardForm",
    "OscillatorModel",
    "PhasePoint",
    "PhaseSystem",
    "StateDependent",
    "reduce_to_phase_system",
    "CATALOG",
    "ModelCatalogEntry",
    "build_coupled_lienard",
    "build_duffing",
    "build_duffing_vdp_general",
    "build_linear_oscillator",
    "build_model",
    "build_van_der_pol",
    "build_vector_duffing",
    "GeneratorOperator",
    "apply_generator",
    "finite_difference_generator",
    "TransformedSystem",
    "build_transformed_system",
    "phi_forward",
    "phi_inverse",
    "DEFAULT_DOMAIN",
    "ROUTE_DAMPING",
    "ROUTE_ORDER",
    "ROUTE_SCALAR",
    "ROUTE_TRACE",
    "ROUTE_VECTOR",
    "ConditionResult",
    "LyapunovCertificate",
    "LyapunovFunction",
    "VerificationDomain",
    "build_energy_lyapunov",
    "build_transformed_lyapunov_scalar",
    "build_transformed_lyapunov_vector",
    "check_damping_bound",
    "check_scalar_transformed_conditions",
    "check_trace_bound",
    "check_vector_transformed_conditions",
    "verify_nonexplosion",
    "EnsembleResult",
    "IntegrationConfig",
    "StrongOrderResult",
    "Trajectory",
    "em_step",
    "estimate_strong_order",
    "simulate_ensemble",
    "simulate_path",
    "wiener_increments",
    "__version__",
]
