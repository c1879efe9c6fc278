"""Closed-form Airy eigenstates of an imaginary absolute-value well with
time-dependent mass, plus the numerical machinery to check them.

Modules:
    airy         complex Airy functions and their negative real zeros
    quadrature   cumulative Simpson integrals with Richardson control
    profiles     mass and coupling histories and the frozen time integrals
    spectrum     static half-line spectrum, normalization, densities
    wavefunction solution assembly in both half-line regions
    verify       finite-difference residual checks and propagator runs
    cli          command-line front end
"""

from .airy import (
    AiryPair,
    AiryZero,
    airy_eval,
    airy_eval_many,
    airy_function_zero,
    airy_derivative_zero,
)
from .profiles import (
    CoefficientSet,
    InvariantCoefficients,
    PhaseValue,
    TimeProfile,
    coefficients_at,
    invariant_coefficients,
    phase,
    shift_reorder_phase,
)
from .spectrum import (
    SpectralLevel,
    level,
    eigenfunction,
    eigenfunction_continued,
    density,
)
from .wavefunction import (
    TransformSpec,
    WavefunctionSample,
    transform_spec,
    transformed_eigenfunction,
    wavefunction_branch,
    assemble_wavefunction,
    reconstructed_density,
    eta_inner_product,
)
from .verify import (
    Grid1D,
    DiscretizedOperator,
    PropagationResult,
    build_hamiltonian,
    build_invariant,
    crank_nicolson_propagate,
    tdse_residual,
    invariant_eigen_residual,
    von_neumann_residual,
    pseudo_hermiticity_check,
)

__all__ = [
    "AiryPair",
    "AiryZero",
    "airy_eval",
    "airy_eval_many",
    "airy_function_zero",
    "airy_derivative_zero",
    "CoefficientSet",
    "InvariantCoefficients",
    "PhaseValue",
    "TimeProfile",
    "coefficients_at",
    "invariant_coefficients",
    "phase",
    "shift_reorder_phase",
    "SpectralLevel",
    "level",
    "eigenfunction",
    "eigenfunction_continued",
    "density",
    "TransformSpec",
    "WavefunctionSample",
    "transform_spec",
    "transformed_eigenfunction",
    "wavefunction_branch",
    "assemble_wavefunction",
    "reconstructed_density",
    "eta_inner_product",
    "Grid1D",
    "DiscretizedOperator",
    "PropagationResult",
    "build_hamiltonian",
    "build_invariant",
    "crank_nicolson_propagate",
    "tdse_residual",
    "invariant_eigen_residual",
    "von_neumann_residual",
    "pseudo_hermiticity_check",
]

__version__ = "0.1.0"
