import random
from fractions import Fraction

import pytest

from ptqao import closed_forms
from ptqao.errors import DegreeError, InconsistentSystem, InvalidParams
from ptqao.metric import (
    HomologicalProblem,
    ProblemParams,
    SDecomposition,
    build_hamiltonian,
    h0_operator,
    q3_rhs,
    random_params,
    s_decomposition,
    solve_homological,
    solve_q1,
    solve_q3,
    verify_s_recursion,
)
from ptqao.weyl import GaussianRational, WeylOperator, X, P, ZERO, adjoint, commutator, weyl_symbol

i = GaussianRational(0, 1)


def _golden_q1(p):
    a, b = p.alpha, p.beta
    return (
        WeylOperator.monomial(1, 0, i * b / a)
        + WeylOperator.monomial(2, 1, -b / a, lam_pow=-1)
        + WeylOperator.monomial(0, 3, -b / (3 * a * a), lam_pow=-1)
    )


def _many(n=20, seed=1234):
    rng = random.Random(seed)
    return [random_params(rng) for _ in range(n)]


def test_build_hamiltonian():
    H = build_hamiltonian(ProblemParams(2, Fraction(1, 3), 5))
    assert H[0] == (P * P) / 2 + 2 * X * X
    assert H[1] == WeylOperator.monomial(3, 0, i / 3)
    assert H[2] == WeylOperator.monomial(4, 0, -5)
    assert H[3].is_zero() and H[4].is_zero()
    with pytest.raises(ValueError):
        build_hamiltonian(ProblemParams(1, 1), truncation=3)


@pytest.mark.parametrize("bad", [(0, 1, 1), (-1, 1, 1), (1, 0, 1), (1, 1, -1), ("1/0", 1, 1)])
def test_invalid_params(bad):
    with pytest.raises(InvalidParams):
        ProblemParams(*bad)


def test_q1_golden_for_random_params():
    for p in _many():
        q1 = solve_q1(p)
        assert q1 == _golden_q1(p)
        assert commutator(h0_operator(p.alpha), q1) + WeylOperator.monomial(3, 0, 2 * i * p.beta) == 0


def test_q1_symbol_parity_and_hermiticity():
    q1 = solve_q1(ProblemParams(Fraction(3, 2), Fraction(-2, 5), 1))
    assert adjoint(q1) == q1
    for (a, b, _), _ in weyl_symbol(q1).items():
        assert a % 2 == 0 and b % 2 == 1


def test_homological_edge_cases():
    h0 = h0_operator(1)
    assert solve_homological(HomologicalProblem(h0, ZERO, 3)).is_zero()
    with pytest.raises(InconsistentSystem):
        solve_homological(HomologicalProblem(h0, WeylOperator.monomial(0, 1, -i, lam_pow=1), 3))
    with pytest.raises(ValueError):
        HomologicalProblem(h0, WeylOperator.monomial(5, 0), 3)


def test_basis_order_does_not_matter():
    p = ProblemParams(1, 1, 1)
    q1 = solve_q1(p)
    problem = HomologicalProblem(h0_operator(p.alpha), q3_rhs(p, q1), 5)
    reference = solve_homological(problem)
    n = len([0 for t in range(6) for a in range(0, t + 1, 2) if (t - a) % 2])
    rng = random.Random(7)
    for _ in range(3):
        order = list(range(n))
        rng.shuffle(order)
        assert solve_homological(problem, basis_order=order) == reference
    with pytest.raises(ValueError):
        solve_homological(problem, basis_order=[0, 0])


def test_q3_unit_params():
    p = ProblemParams(1, 1, 1)
    q3 = solve_q3(p, solve_q1(p))
    expected = (
        WeylOperator.monomial(4, 1, -1, -1)
        + WeylOperator.monomial(2, 3, Fraction(-7, 6), -1)
        + WeylOperator.monomial(0, 5, Fraction(-2, 15), -1)
        + WeylOperator.monomial(3, 0, 2 * i)
        + WeylOperator.monomial(1, 2, Fraction(7, 2) * i)
        + WeylOperator.monomial(0, 1, 2, 1)
    )
    assert q3 == expected


def test_q3_properties_random():
    for p in _many(6, seed=99) + [ProblemParams(2, 3, 0)]:
        q1 = solve_q1(p)
        q3 = solve_q3(p, q1)
        assert q3.max_p_power() <= 5
        assert q3.is_hermitian()
        assert not q3.is_zero()
        assert commutator(h0_operator(p.alpha), q3) == q3_rhs(p, q1)


def test_s_values():
    for p in _many():
        s = s_decomposition(solve_q1(p).substitute_lambda(1))
        assert s.s == closed_forms.s_values(p)
    s = s_decomposition(solve_q1(ProblemParams(2, 3)).substitute_lambda(1))
    assert s[3] == WeylOperator.scalar(Fraction(1, 4))
    assert all(x.is_zero() for x in s_decomposition(ZERO).s)


def test_s_decomposition_rejects():
    with pytest.raises(ValueError):
        s_decomposition(solve_q1(ProblemParams(1, 1)))
    with pytest.raises(DegreeError):
        s_decomposition(WeylOperator.monomial(0, 4))


def test_s_round_trip():
    q1 = solve_q1(ProblemParams(3, -2, 1)).substitute_lambda(1)
    assert s_decomposition(q1).to_operator() == q1


def test_s_recursion_residuals():
    for p in _many(10, seed=5):
        s = s_decomposition(solve_q1(p).substitute_lambda(1))
        assert all(r.is_zero() for r in verify_s_recursion(s, p).values())
    p = ProblemParams(1, 1, 1)
    s = s_decomposition(solve_q1(p).substitute_lambda(1))
    bumped = s.replace(3, s[3] + 1)
    assert not verify_s_recursion(bumped, p)[2].is_zero()
    empty = SDecomposition((ZERO,) * 4)
    assert any(not r.is_zero() for r in verify_s_recursion(empty, p).values())
