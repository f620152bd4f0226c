"""Lie-system tools for time-dependent harmonic oscillators on SL(2, R)."""
from .closed_form import (
    ReducedSystem, ck_solution, fundamental_matrix, powerlaw2_solution, quartic_solution,
)
from .integrability import (
    IntegrabilityReport, detect_kcond, detect_quartic, generate_family_c2tu, kcond_ratio,
    quartic_transform,
)
from .invariants import (
    MilnePinneyState, conservation_drift, freq_from_rho, invariants_powerlaw2,
    invariants_quartic, kcond_first_integral, lewis_cointegrate, lewis_invariant,
    milne_pinney_integrate, powerlaw2_I1, powerlaw2_I2, powerlaw2_reduce, quartic_I1,
    quartic_phase,
)
from .ode import IntegrationError, IvpProblem, SampledCurve, integrate, quadrature, sampled_derivative
from .sl2 import GroupElement, Traceless, basis_matrix, bracket, exp_traceless
from .system import (
    BlowUpError, CoefficientCurve, GroupPath, PhaseState, TdfhoSpec, Trajectory, caldirola_kanai,
    catalog_curve, coeffs_from_spec, constant_curve, flow_state, from_frequency, integrate_group,
    integrate_trajectory, powerlaw2, quartic, riccati_project, sampled_coefficients, system_matrix,
)
from .transform import (
    TransformCurve, compose_action, gauge_transform_coeffs, integrate_connecting,
    solve_connecting_curve, transform_trajectory,
)

__version__ = "0.1.0"
