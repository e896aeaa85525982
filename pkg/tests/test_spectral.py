from fractions import Fraction

import numpy as np
import pytest

from ptqao.errors import NonConvergence
from ptqao.metric import ProblemParams, h0_operator
from ptqao.spectral import (
    BasisSpec,
    eigen_complex,
    eigen_hermitian,
    fit_slope,
    metric_residual_matrix,
    oscillator_matrices,
    spectrum_comparison,
    to_matrix,
)
from ptqao.weyl import WeylOperator, X, P

SMALL = BasisSpec(1.0, n=16, buffer=8)


def test_canonical_commutator_on_interior():
    x, p = oscillator_matrices(SMALL)
    comm = (x @ p - p @ x)[: SMALL.n, : SMALL.n]
    np.testing.assert_allclose(comm, 1j * np.eye(SMALL.n), atol=1e-12)


def test_harmonic_hamiltonian_is_diagonal():
    for alpha in (Fraction(1, 2), Fraction(1), Fraction(9, 8)):
        basis = BasisSpec(float(alpha), n=16, buffer=8)
        h = to_matrix(h0_operator(alpha), basis)
        expected = basis.omega * (np.arange(basis.n) + 0.5)
        np.testing.assert_allclose(h, np.diag(expected), atol=1e-12)


def test_unit_frequency_entries():
    x, p = oscillator_matrices(BasisSpec(0.5, n=8, buffer=2))
    assert x[0, 1] == pytest.approx(np.sqrt(0.5))
    assert x[2, 3] == pytest.approx(np.sqrt(1.5))
    assert p[1, 0] == pytest.approx(1j * np.sqrt(0.5))


def test_to_matrix_linearity_and_identity():
    np.testing.assert_allclose(to_matrix(WeylOperator.scalar(1), SMALL), np.eye(SMALL.n))
    a, b = X * X * P, P ** 3
    lhs = to_matrix(a.scale(2) + b.scale(3j), SMALL)
    rhs = 2 * to_matrix(a, SMALL) + 3j * to_matrix(b, SMALL)
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)
    np.testing.assert_allclose(
        to_matrix((X * P - P * X).substitute_lambda(1), SMALL), 1j * np.eye(SMALL.n), atol=1e-12
    )
    with pytest.raises(ValueError):
        to_matrix(WeylOperator.lam(), SMALL)


def test_basis_spec_validation():
    with pytest.raises(ValueError):
        BasisSpec(1.0, n=4)
    with pytest.raises(ValueError):
        BasisSpec(1.0, n=80, buffer=10)
    with pytest.raises(ValueError):
        BasisSpec(0.0)


def test_eigensolvers():
    np.testing.assert_allclose(eigen_hermitian(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])
    vals = eigen_complex(np.array([[0, 1], [-1, 0]], dtype=complex))
    np.testing.assert_allclose(vals, [-1j, 1j], atol=1e-14)
    rng = np.random.default_rng(3)
    m = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    herm = m + m.conj().T
    np.testing.assert_allclose(np.sort(eigen_complex(herm).real), eigen_hermitian(herm), atol=1e-10)
    with pytest.raises(ValueError):
        eigen_hermitian(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eigen_complex(np.array([[np.nan]]))
    assert issubclass(NonConvergence, RuntimeError)


def test_fit_slope():
    eps = [0.01, 0.02, 0.04]
    assert fit_slope(eps, [e ** 3 for e in eps]) == pytest.approx(3.0)
    assert fit_slope([0.01], [1e-4]) is None
    assert fit_slope(eps, [0, 0, 1e-3]) is None


def test_spectrum_comparison_small_basis():
    basis = BasisSpec(1.0, n=40, buffer=16)
    report = spectrum_comparison(ProblemParams(1, 1, 1), [0.0, 0.01], n_levels=4, basis=basis)
    assert report.dev_order2[0] == pytest.approx(0, abs=1e-12)
    assert report.dev_order4[0] == pytest.approx(0, abs=1e-12)
    assert max(report.max_imag) < 1e-7
    assert report.dev_order4[1] < report.dev_order2[1]
    with pytest.raises(ValueError):
        spectrum_comparison(ProblemParams(1, 1, 1), [0.02, 0.01], basis=basis)
    with pytest.raises(ValueError):
        spectrum_comparison(ProblemParams(1, 1, 1), [0.01], n_levels=9, basis=basis)


def test_metric_is_positive_definite():
    norm, eta, eigs = metric_residual_matrix(ProblemParams(1, 1, 1), 0.02, return_eta=True)
    assert np.all(eigs > 0)
    np.testing.assert_allclose(eta, eta.conj().T, atol=1e-14)
    assert np.all(np.linalg.eigvalsh(eta) > 0)
    assert norm < 1e-4
    with pytest.raises(ValueError):
        metric_residual_matrix(ProblemParams(1, 1, 1), 0.5)
