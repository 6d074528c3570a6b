"""Rational spectral solver for the fractional Schrodinger equation on the line."""

from .basis import (
    SampledFunction,
    SpectralState,
    ThetaGrid,
    analyze,
    diff_matrix,
    eval_mtf,
    mcf_analyze,
    mcf_eval,
    mcf_synthesize,
    pad_state,
    synthesize,
    synthesize_at_nodes,
)
from .diagnostics import ConvergenceReport, decay_slope, fit_order, mass, mass_via_grid, max_error
from .expm import HermitianPropagator, cheb_expm, propagator_error_budget
from .fraclap import (
    FracLapOperator,
    assemble_core,
    assemble_core_alpha1,
    assemble_full,
    beta_coeff,
    frac_laplacian_mtf,
    oracle_entry,
)
from .nonlinear import apply_nonlinear, rho_coeffs
from .potential import ToeplitzOperator, assemble_toeplitz, mu_coeffs, potential_operator, toeplitz_matvec
from .stepper import (
    SM1,
    SM2,
    SM3,
    BlowUpError,
    KrogstadTables,
    SplittingPropagators,
    amplification_coefficients,
    amplification_factor,
    evolve_linear,
    evolve_nonlinear,
    exact_propagate,
    focusing_cubic,
    krogstad_p22_step,
    stability_region,
)

__version__ = "0.1.0"
