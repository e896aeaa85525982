"""Metric operator, Hermitian equivalent and classical limit of the PT-symmetric
quartic anharmonic oscillator, with exact algebra and spectral cross-checks."""

from .weyl import (
    GaussianRational,
    PhaseSpacePolynomial,
    WeylOperator,
    X,
    P,
    adjoint,
    anticommutator,
    commutator,
    is_pt_symmetric,
    multiply,
    pt_transform,
    reorder,
    substitute_lambda,
    weyl_quantize,
    weyl_symbol,
)
from .series import EpsilonSeries, bch_conjugate
from .metric import (
    HomologicalProblem,
    ProblemParams,
    SDecomposition,
    build_hamiltonian,
    s_decomposition,
    solve_homological,
    solve_q1,
    solve_q3,
    verify_s_recursion,
)
from .equivalence import (
    PdmDecomposition,
    QuarticClassification,
    assemble_h,
    classify_quartic,
    extract_pdm,
    h_order2,
    h_order4,
    physical_momentum,
    physical_position,
    pseudo_hermiticity_residual,
    w_functions,
)

__version__ = "0.1.0"

__all__ = [
    "GaussianRational",
    "PhaseSpacePolynomial",
    "WeylOperator",
    "X",
    "P",
    "adjoint",
    "anticommutator",
    "commutator",
    "is_pt_symmetric",
    "multiply",
    "pt_transform",
    "reorder",
    "substitute_lambda",
    "weyl_quantize",
    "weyl_symbol",
    "HomologicalProblem",
    "ProblemParams",
    "SDecomposition",
    "build_hamiltonian",
    "s_decomposition",
    "solve_homological",
    "solve_q1",
    "solve_q3",
    "verify_s_recursion",
    "PdmDecomposition",
    "QuarticClassification",
    "assemble_h",
    "classify_quartic",
    "extract_pdm",
    "h_order2",
    "h_order4",
    "physical_momentum",
    "physical_position",
    "pseudo_hermiticity_residual",
    "w_functions",
    "EpsilonSeries",
    "bch_conjugate",
]
