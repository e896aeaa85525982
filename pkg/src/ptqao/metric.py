"""Perturbative metric generator for the PT-symmetric quartic oscillator.

The metric is ``eta = exp(-Q)`` with ``Q = eps Q1 + eps^3 Q3 + ...``.  Each
order solves a homological equation ``[H0, Q] = R`` with
``H0 = P^2/2 + alpha X^2``.  The solver works in the basis of Weyl-quantized
monomials ``x^a p^b`` (a even, b odd), which removes the kernel of ``[H0, .]``
and makes the solution unique.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import AmbiguousSolution, DegreeError, InconsistentSystem, InvalidParams
from .series import EpsilonSeries
from .weyl import (
    GaussianRational,
    PhaseSpacePolynomial,
    WeylOperator,
    X,
    P,
    ZERO,
    commutator,
    weyl_quantize,
    weyl_symbol,
)

__all__ = [
    "ProblemParams",
    "HomologicalProblem",
    "SDecomposition",
    "build_hamiltonian",
    "h0_operator",
    "solve_homological",
    "solve_q1",
    "solve_q3",
    "q3_rhs",
    "metric_generator",
    "s_decomposition",
    "verify_s_recursion",
    "x_derivative",
]

I = GaussianRational(0, 1)


@dataclass(frozen=True)
class ProblemParams:
    """Dimensionless couplings of the harmonic, cubic and quartic terms."""

    alpha: Fraction
    beta: Fraction
    gamma: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            try:
                value = Fraction(value)
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise InvalidParams(f"{name}: not an exact rational ({value!r})") from exc
            object.__setattr__(self, name, value)
        if self.alpha <= 0:
            raise InvalidParams("alpha must be positive")
        if self.beta == 0:
            raise InvalidParams("beta must be nonzero")
        if self.gamma < 0:
            raise InvalidParams("gamma must be non-negative")

    @property
    def discriminant(self) -> Fraction:
        return 3 * self.beta ** 2 - 4 * self.alpha * self.gamma


def h0_operator(alpha) -> WeylOperator:
    return (P * P).scale(Fraction(1, 2)) + (X * X).scale(Fraction(alpha))


def build_hamiltonian(params: ProblemParams, truncation: int = 4) -> EpsilonSeries:
    """``H0 + eps*i*beta*X^3 - eps^2*gamma*X^4``."""
    if not isinstance(params, ProblemParams):
        raise InvalidParams("expected ProblemParams")
    if truncation < 4:
        raise ValueError("Hamiltonian series needs truncation order >= 4")
    return EpsilonSeries(
        {
            0: h0_operator(params.alpha),
            1: WeylOperator.monomial(3, 0, I * params.beta),
            2: WeylOperator.monomial(4, 0, -params.gamma),
        },
        truncation,
    )


@dataclass(frozen=True)
class HomologicalProblem:
    h0: WeylOperator
    rhs: WeylOperator
    degree_bound: int

    def __post_init__(self):
        if self.degree_bound < self.rhs.total_degree():
            raise ValueError("degree bound below the total degree of the right-hand side")


def _weight(key) -> int:
    a, b, k = key
    return a + b + 2 * k


def _constrained_basis(degree_bound: int) -> List[Tuple[int, int]]:
    """Symbol monomials even in x and odd in p."""
    return [
        (a, b)
        for total in range(degree_bound + 1)
        for a in range(0, total + 1, 2)
        for b in [total - a]
        if b % 2 == 1
    ]


def solve_homological(
    problem: HomologicalProblem, basis_order: Optional[Sequence[int]] = None
) -> WeylOperator:
    """Unique Hermitian ``Q`` with symbol even in x, odd in p and ``[h0, Q] = rhs``.

    ``h0`` must be homogeneous in the grading ``deg X + deg P + 2 deg lam``;
    the linear system then splits into exact blocks over the Gaussian
    rationals, one per weight of the right-hand side.  ``basis_order`` permutes
    the unknowns (the result must not depend on it).
    """
    weights = {_weight(k) for k, _ in problem.h0.items()}
    if len(weights) != 1:
        raise ValueError("h0 must be weight-homogeneous")
    (w0,) = weights

    basis = _constrained_basis(problem.degree_bound)
    if basis_order is not None:
        if sorted(basis_order) != list(range(len(basis))):
            raise ValueError("basis_order must be a permutation of the basis indices")
        basis = [basis[i] for i in basis_order]

    rhs_symbol = weyl_symbol(problem.rhs)
    by_weight: Dict[int, Dict[tuple, GaussianRational]] = {}
    for key, v in rhs_symbol.items():
        by_weight.setdefault(_weight(key), {})[key] = v

    solution: Dict[tuple, GaussianRational] = {}
    for w, target in sorted(by_weight.items()):
        unknowns = []
        columns = []
        for a, b in basis:
            twice_m = w - w0 - a - b
            if twice_m % 2:
                continue
            m = twice_m // 2
            trial = weyl_quantize(PhaseSpacePolynomial({(a, b, m): 1}))
            image = weyl_symbol(commutator(problem.h0, trial))
            unknowns.append((a, b, m))
            columns.append(dict(image.items()))
        coeffs = _solve_exact(columns, target, w)
        for key, c in zip(unknowns, coeffs):
            if c:
                solution[key] = c

    q = weyl_quantize(PhaseSpacePolynomial(solution))
    if not q.is_hermitian():
        raise InconsistentSystem("no Hermitian solution: right-hand side is not anti-Hermitian")
    return q


def _solve_exact(columns, target, weight) -> List[GaussianRational]:
    """Exact Gauss-Jordan elimination for ``sum_j c_j columns[j] = target``."""
    rows = sorted({key for col in columns for key in col} | set(target))
    n = len(columns)
    zero = GaussianRational(0)
    aug = [[col.get(r, zero) for col in columns] + [target.get(r, zero)] for r in rows]

    pivots = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, len(aug)) if aug[i][c]), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = GaussianRational(1) / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [vi - f * vr for vi, vr in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(row[n] for row in aug[r:]):
        raise InconsistentSystem(
            f"right-hand side (weight {weight}) is outside the image of [H0, .]"
        )
    if len(pivots) < n:
        raise AmbiguousSolution(f"commutator map has a kernel at weight {weight}")
    out = [zero] * n
    for i, c in enumerate(pivots):
        out[c] = aug[i][n]
    return out


def solve_q1(params: ProblemParams, flip_sign: bool = False) -> WeylOperator:
    """First-order generator from ``[H0, Q1] = -2 i beta X^3``.

    ``flip_sign`` reverses the sign of the right-hand side (debug only).
    """
    rhs = WeylOperator.monomial(3, 0, I * (-2 * params.beta))
    if flip_sign:
        rhs = -rhs
    q1 = solve_homological(HomologicalProblem(h0_operator(params.alpha), rhs, 3))
    if q1.max_p_power() > 3:
        raise DegreeError("Q1 has more than three powers of P")
    return q1


def q3_rhs(params: ProblemParams, q1: WeylOperator) -> WeylOperator:
    """``-1/6 [Q1, [Q1, i V]] - [Q1, V2]`` with ``V = beta X^3``, ``V2 = gamma X^4``."""
    iv = WeylOperator.monomial(3, 0, I * params.beta)
    v2 = WeylOperator.monomial(4, 0, params.gamma)
    return commutator(q1, commutator(q1, iv)).scale(Fraction(-1, 6)) - commutator(q1, v2)


def solve_q3(params: ProblemParams, q1: WeylOperator) -> WeylOperator:
    problem = HomologicalProblem(h0_operator(params.alpha), q3_rhs(params, q1), 5)
    q3 = solve_homological(problem)
    if q3.max_p_power() > 5:
        raise DegreeError("Q3 has more than five powers of P")
    return q3


def metric_generator(params: ProblemParams, order: int = 3) -> EpsilonSeries:
    """``eps Q1 + eps^3 Q3`` (``order`` 1 or 3)."""
    q1 = solve_q1(params)
    parts = {1: q1}
    if order >= 3:
        parts[3] = solve_q3(params, q1)
    return EpsilonSeries(parts, max(order, 4))


def x_derivative(op: WeylOperator, n: int = 1) -> WeylOperator:
    """n-th derivative of a P-free operator, read as a polynomial in X."""
    if not op.is_p_free():
        raise ValueError("x_derivative needs a P-free operator")
    out = op
    for _ in range(n):
        out = WeylOperator({(a - 1, 0, k): v * a for (a, _, k), v in out.items() if a})
    return out


@dataclass(frozen=True)
class SDecomposition:
    """Coefficient functions of ``Q1 = -i sum_k S_k(X) (d/dX)^k`` (lam = 1)."""

    s: Tuple[WeylOperator, ...] = field(default_factory=tuple)

    def __getitem__(self, k: int) -> WeylOperator:
        return self.s[k] if 0 <= k < len(self.s) else ZERO

    def __len__(self):
        return len(self.s)

    def to_operator(self) -> WeylOperator:
        # d/dX -> i P at lam = 1
        out = ZERO
        for k, sk in enumerate(self.s):
            out = out + (sk * WeylOperator.monomial(0, k)).scale(-I * I ** k)
        return out

    def replace(self, k: int, value: WeylOperator) -> "SDecomposition":
        s = list(self.s) + [ZERO] * max(0, k + 1 - len(self.s))
        s[k] = value
        return SDecomposition(tuple(s))


def s_decomposition(q1: WeylOperator, max_order: int = 3) -> SDecomposition:
    """Read off ``S_0..S_3`` from a lam-free ``Q1``."""
    if q1.lambda_range() not in (None, (0, 0)):
        raise ValueError("s_decomposition expects Q1 evaluated at lam = 1")
    if q1.max_p_power() > max_order:
        raise DegreeError(f"Q1 contains P^{q1.max_p_power()}; at most P^{max_order} allowed")
    s = []
    for k in range(max_order + 1):
        ck = WeylOperator({(a, 0, 0): v for (a, b, _), v in q1.items() if b == k})
        # c_k = -i * i^k * S_k
        s.append(ck.scale(GaussianRational(1) / (-I * I ** k)))
    return SDecomposition(tuple(s))


def verify_s_recursion(s: SDecomposition, params: ProblemParams) -> Dict[int, WeylOperator]:
    """Residuals of the S_k relations for ``V1 = alpha X^2``, cubic term ``beta X^3``.

    k = 0:  1/2 S_0'' + sum_{j>=1} S_j V1^(j) + 2 V
    k >= 1: 1/2 S_k'' + S_{k-1}' + sum_{j>=k+1} C(j,k) S_j V1^(j-k)
    Every residual should vanish identically.
    """
    v1 = WeylOperator.monomial(2, 0, params.alpha)
    v = WeylOperator.monomial(3, 0, params.beta)
    top = len(s)
    residuals: Dict[int, WeylOperator] = {}
    for k in range(top + 1):
        res = x_derivative(s[k], 2).scale(Fraction(1, 2))
        if k == 0:
            res = res + v.scale(2)
        else:
            res = res + x_derivative(s[k - 1], 1)
        for j in range(k + 1, top):
            res = res + (s[j] * x_derivative(v1, j - k)).scale(comb(j, k))
        residuals[k] = res
    return residuals


def random_params(rng: random.Random, allow_zero_gamma: bool = True) -> ProblemParams:
    """Random small rationals in the valid parameter domain."""
    def rat(lo, hi):
        return Fraction(rng.randint(lo, hi), rng.randint(1, 9))

    alpha = Fraction(rng.randint(1, 12), rng.randint(1, 9))
    beta = Fraction(0)
    while beta == 0:
        beta = rat(-12, 12)
    gamma = rat(0 if allow_zero_gamma else 1, 12)
    return ProblemParams(alpha, beta, gamma)
