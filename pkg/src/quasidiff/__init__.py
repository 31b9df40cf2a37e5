"""Quasi-differential operators with Shin--Zettl coefficients.

Piecewise coefficients, quasi-derivative matrices, a Cauchy solver with
dense output, boundary triplets, extensions parameterised by a matrix ``K``
and spectral computations (eigenvalues, eigenfunctions, resolvents).
"""

from .coefficients import PiecewiseCoefficient, l1_norm, merge_breakpoints
from .errors import QuasiDiffError
from .extensions import (
    ExtensionSpec,
    boundary_condition_matrix,
    classify,
    preset,
    quasi_periodic,
    same_extension,
    separated,
)
from .ode import fundamental_matrix, solve_cauchy
from .shinzettl import (
    ShinZettlMatrix,
    build_sturm_liouville,
    build_two_term,
    free_matrix,
    is_formally_selfadjoint,
    lagrange_adjoint,
    validate,
)
from .spectral import (
    ConstantFamily,
    MobiusFamily,
    ScanOptions,
    TabulatedFamily,
    eigenfunction,
    eigenfunctions,
    eigenvalues_complex_box,
    eigenvalues_real_scan,
    generalized_resolvent_apply,
    l2_norm,
    resolvent_apply,
)
from .triplet import (
    boundary_form,
    build_triplet,
    greens_identity_residual,
    lagrange_form,
    realize_boundary_data,
)

__version__ = "0.1.0"

__all__ = [
    "ConstantFamily",
    "ExtensionSpec",
    "MobiusFamily",
    "PiecewiseCoefficient",
    "QuasiDiffError",
    "ScanOptions",
    "ShinZettlMatrix",
    "TabulatedFamily",
    "boundary_condition_matrix",
    "boundary_form",
    "build_sturm_liouville",
    "build_triplet",
    "build_two_term",
    "classify",
    "eigenfunction",
    "eigenfunctions",
    "eigenvalues_complex_box",
    "eigenvalues_real_scan",
    "free_matrix",
    "fundamental_matrix",
    "generalized_resolvent_apply",
    "greens_identity_residual",
    "is_formally_selfadjoint",
    "l1_norm",
    "l2_norm",
    "lagrange_adjoint",
    "lagrange_form",
    "merge_breakpoints",
    "preset",
    "quasi_periodic",
    "realize_boundary_data",
    "resolvent_apply",
    "same_extension",
    "separated",
    "solve_cauchy",
    "validate",
]
