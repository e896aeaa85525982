"""Equivalent Hermitian Hamiltonian, PDM split and physical observables."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Dict, List

from .errors import DegreeError, ResidualError
from .metric import (
    ProblemParams,
    SDecomposition,
    build_hamiltonian,
    solve_q1,
    solve_q3,
    x_derivative,
)
from .series import EpsilonSeries, bch_conjugate
from .weyl import GaussianRational, WeylOperator, X, P, ZERO, adjoint, commutator

__all__ = [
    "PdmDecomposition",
    "QuarticClassification",
    "Quartic",
    "classify_quartic",
    "h_order2",
    "h_order4",
    "extract_pdm",
    "w_functions",
    "w_relations",
    "physical_position",
    "physical_momentum",
    "pseudo_hermiticity_residual",
    "assemble_h",
]

I = GaussianRational(0, 1)


def _h1(params: ProblemParams) -> WeylOperator:
    return WeylOperator.monomial(3, 0, I * params.beta)


def _h2(params: ProblemParams) -> WeylOperator:
    return WeylOperator.monomial(4, 0, -params.gamma)


def h_order2(params: ProblemParams, q1: WeylOperator) -> WeylOperator:
    """``H2 + 1/4 [H1, Q1]``."""
    return _h2(params) + commutator(_h1(params), q1).scale(Fraction(1, 4))


def h_order4(params: ProblemParams, q1: WeylOperator, q3: WeylOperator) -> WeylOperator:
    """``1/4 [H1, Q3] - 1/192 [[[H1, Q1], Q1], Q1]``."""
    h1 = _h1(params)
    nested = commutator(commutator(commutator(h1, q1), q1), q1)
    return commutator(h1, q3).scale(Fraction(1, 4)) - nested.scale(Fraction(1, 192))


@dataclass(frozen=True)
class PdmDecomposition:
    """``h2 = 1/2 P M(X) P + V(X)``."""

    mass_correction: WeylOperator
    effective_potential: WeylOperator

    @property
    def mass_is_even(self) -> bool:
        return self.mass_correction.reflect(x_sign=-1) == self.mass_correction

    def to_operator(self) -> WeylOperator:
        return (P * self.mass_correction * P).scale(Fraction(1, 2)) + self.effective_potential

    def substitute_lambda(self, value) -> "PdmDecomposition":
        return PdmDecomposition(
            self.mass_correction.substitute_lambda(value),
            self.effective_potential.substitute_lambda(value),
        )


def extract_pdm(h2: WeylOperator, require_even_mass: bool = False) -> PdmDecomposition:
    """Split a second-order Hamiltonian into mass correction and effective potential.

    The mass correction is twice the P^2 coefficient.  With
    ``require_even_mass`` an odd mass profile raises ``ResidualError``;
    otherwise inspect :attr:`PdmDecomposition.mass_is_even`.  An input free of
    lam is taken to be evaluated at lam = 1.
    """
    if h2.max_p_power() > 2:
        raise DegreeError("PDM split needs at most two powers of P")
    mass = WeylOperator({(a, 0, k): v * 2 for (a, b, k), v in h2.items() if b == 2})
    kinetic = (P * mass * P).scale(Fraction(1, 2))
    if h2.lambda_range() in (None, (0, 0)):
        # lam-free input is read as already evaluated at lam = 1
        kinetic = kinetic.substitute_lambda(1)
    potential = h2 - kinetic
    if not potential.is_p_free():
        raise ResidualError(f"remainder is not a pure potential: {potential}")
    pdm = PdmDecomposition(mass, potential)
    if require_even_mass and not pdm.mass_is_even:
        raise ResidualError("mass correction is not even in X")
    return pdm


class Quartic(str, Enum):
    ATTRACTIVE = "attractive"
    NULL = "null"
    REPULSIVE = "repulsive"


@dataclass(frozen=True)
class QuarticClassification:
    kind: Quartic
    discriminant: Fraction


def classify_quartic(params: ProblemParams) -> QuarticClassification:
    """Sign of ``3 beta^2 - 4 alpha gamma`` decides the effective quartic term."""
    d = params.discriminant
    if d > 0:
        kind = Quartic.ATTRACTIVE
    elif d == 0:
        kind = Quartic.NULL
    else:
        kind = Quartic.REPULSIVE
    return QuarticClassification(kind, d)


def w_functions(s: SDecomposition, params: ProblemParams, count: int = 5) -> List[WeylOperator]:
    """``W_k = sum_{j>=k+1} C(j,k) S_j d^(j-k)(beta X^3)/dX^(j-k)`` for k < count."""
    v = WeylOperator.monomial(3, 0, params.beta)
    return [
        sum(
            ((s[j] * x_derivative(v, j - k)).scale(comb(j, k)) for j in range(k + 1, len(s))),
            ZERO,
        )
        for k in range(count)
    ]


def w_relations(s: SDecomposition, params: ProblemParams, pdm: PdmDecomposition,
                count: int = 5) -> Dict[str, WeylOperator]:
    """Residuals of the W relations at lam = 1; all should be zero.

    ``pdm`` must be the lam = 1 decomposition of the second-order Hamiltonian.
    """
    w = w_functions(s, params, count)
    v2 = WeylOperator.monomial(4, 0, params.gamma)
    mass = pdm.mass_correction
    out = {
        "W0": w[0] + (pdm.effective_potential + v2).scale(4),
        "W1": w[1] - x_derivative(mass).scale(2),
        "W2": w[2] - mass.scale(2),
    }
    for k in range(3, count):
        out[f"W{k}"] = w[k]
    return out


def _observable(op: WeylOperator, q: EpsilonSeries, order: int) -> EpsilonSeries:
    if order > 3:
        raise ValueError("physical observables are available through eps^3 only")
    if q.truncation < order:
        raise ValueError("generator series truncated below the requested order")
    return bch_conjugate(EpsilonSeries.constant(op, order), q.truncate(order), Fraction(1, 2), order)


def physical_position(params: ProblemParams, q: EpsilonSeries, order: int = 3) -> EpsilonSeries:
    """``rho^-1 X rho`` with ``rho = exp(-Q/2)``."""
    return _observable(X, q, order)


def physical_momentum(params: ProblemParams, q: EpsilonSeries, order: int = 3) -> EpsilonSeries:
    """``rho^-1 P rho`` with ``rho = exp(-Q/2)``."""
    return _observable(P, q, order)


def pseudo_hermiticity_residual(H: EpsilonSeries, q: EpsilonSeries, order: int) -> EpsilonSeries:
    """``H^dagger - exp(-Q) H exp(Q)`` order by order."""
    if order > 4:
        raise ValueError("residual is only defined through eps^4")
    lhs = H.truncate(order).map(adjoint)
    # exp(-Q) H exp(Q) == bch_conjugate(H, -Q, 1)
    rhs = bch_conjugate(H.truncate(order), (-q).truncate(order), 1, order)
    return lhs - rhs


def assemble_h(params: ProblemParams, max_order: int = 4) -> EpsilonSeries:
    """``h = rho H rho^-1`` through eps^max_order (2 or 4)."""
    if max_order not in (2, 4):
        raise ValueError("max_order must be 2 or 4")
    q1 = solve_q1(params)
    parts = {1: q1}
    if max_order == 4:
        parts[3] = solve_q3(params, q1)
    q = EpsilonSeries(parts, max_order)
    H = build_hamiltonian(params).truncate(max_order)
    h = bch_conjugate(H, q, Fraction(-1, 2), max_order)
    for k, op in h.items():
        if op.has_negative_lambda():
            raise ResidualError(f"order eps^{k} carries a negative power of lam")
    return h
