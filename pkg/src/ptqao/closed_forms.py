"""Closed-form reference results with mu0 = ell = 1 and hbar -> lam.

Written independently of the solver, in anticommutator form, and used as
golden references.
"""
from __future__ import annotations

from fractions import Fraction

from .metric import ProblemParams
from .series import EpsilonSeries
from .weyl import GaussianRational, PhaseSpacePolynomial, WeylOperator, X, P, anticommutator

__all__ = [
    "s_values",
    "mass_correction",
    "effective_potential",
    "h_order4",
    "position_series",
    "momentum_series",
    "classical_hamiltonian",
]

I = GaussianRational(0, 1)
F = Fraction


def _x(n):
    return WeylOperator.monomial(n, 0)


def _p(n):
    return WeylOperator.monomial(0, n)


def _lam(k=1):
    return WeylOperator.lam(k)


def s_values(params: ProblemParams):
    """S_0..S_3 as P-free operators (lam = 1)."""
    a, b = params.alpha, params.beta
    return (
        _x(1).scale(-b / a),
        _x(2).scale(-b / a),
        WeylOperator({}),
        WeylOperator.scalar(b / (3 * a * a)),
    )


def mass_correction(params: ProblemParams) -> WeylOperator:
    a, b = params.alpha, params.beta
    return _x(2).scale(3 * b * b / (2 * a * a))


def effective_potential(params: ProblemParams) -> WeylOperator:
    a, b, c = params.alpha, params.beta, params.gamma
    return _x(4).scale((3 * b * b - 4 * a * c) / (4 * a)) - _lam(2).scale(b * b / (2 * a * a))


def h_order4(params: ProblemParams) -> WeylOperator:
    a, b, c = params.alpha, params.beta, params.gamma
    ac = anticommutator
    quartic_family = (
        _p(6)
        - ac(_x(2), _p(4)).scale(18 * a)
        - ac(_x(4), _p(2)).scale(F(51, 2) * a ** 2)
        - _x(6).scale(14 * a ** 3)
        - (_lam(2) * _p(2)).scale(81 * a)
        - (_lam(2) * _x(2)).scale(138 * a ** 2)
    )
    coupling_family = (
        ac(_x(2), _p(4)).scale(F(1, 2))
        + ac(_x(4), _p(2)).scale(F(3, 2) * a)
        + _x(6).scale(a ** 2)
        + (_lam(2) * _p(2)).scale(2)
        + (_lam(2) * _x(2)).scale(8 * a)
    )
    return quartic_family.scale(b ** 4 / (32 * a ** 6)) + coupling_family.scale(
        3 * b ** 2 * c / (2 * a ** 4)
    )


def position_series(params: ProblemParams) -> EpsilonSeries:
    a, b, c = params.alpha, params.beta, params.gamma
    ac = anticommutator
    order1 = (_p(2) + _x(2).scale(a)).scale(I * b / (2 * a ** 2))
    order2 = (ac(X, _p(2)) - _x(3).scale(2 * a)).scale(b ** 2 / (8 * a ** 3))
    order3 = (
        _p(4).scale(5) + ac(_x(2), _p(2)).scale(6 * a) + (_x(4).scale(5 * a) + _lam(2).scale(3)).scale(a)
    ).scale(-I * b ** 3 / (8 * a ** 5)) + (
        _p(4).scale(2) + ac(_x(2), _p(2)).scale(3 * a) + (_x(4).scale(a) + _lam(2)).scale(2 * a)
    ).scale(I * b * c / (2 * a ** 4))
    return EpsilonSeries({0: X, 1: order1, 2: order2, 3: order3}, 3)


def momentum_series(params: ProblemParams) -> EpsilonSeries:
    a, b, c = params.alpha, params.beta, params.gamma
    ac = anticommutator
    order1 = ac(X, P).scale(-I * b / (2 * a))
    order2 = (_p(3).scale(2) - ac(_x(2), P).scale(a)).scale(b ** 2 / (8 * a ** 3))
    order3 = (ac(X, _p(3)) + ac(_x(3), P).scale(4 * a)).scale(I * b ** 3 / (4 * a ** 4)) - (
        ac(X, _p(3)) + ac(_x(3), P).scale(2 * a)
    ).scale(I * b * c / a ** 3)
    return EpsilonSeries({0: P, 1: order1, 2: order2, 3: order3}, 3)


def classical_hamiltonian(params: ProblemParams) -> dict:
    """eps-power -> PhaseSpacePolynomial in (x, p)."""
    a, b, c = params.alpha, params.beta, params.gamma

    def mono(i, j, coef):
        return PhaseSpacePolynomial({(i, j, 0): coef})

    order0 = mono(0, 2, F(1, 2)) + mono(2, 0, a)
    order2 = (mono(2, 2, 1) + mono(4, 0, a)).scale(3 * b ** 2 / (4 * a ** 2)) - mono(4, 0, c)
    order4 = (
        mono(0, 6, 1) - mono(2, 4, 36 * a) - mono(4, 2, 51 * a ** 2) - mono(6, 0, 14 * a ** 3)
    ).scale(b ** 4 / (32 * a ** 6)) + (
        mono(2, 4, 1) + mono(4, 2, 3 * a) + mono(6, 0, a ** 2)
    ).scale(3 * b ** 2 * c / (2 * a ** 4))
    return {0: order0, 2: order2, 4: order4}
