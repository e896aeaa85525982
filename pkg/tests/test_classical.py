import random
from fractions import Fraction

import numpy as np
import pytest

from ptqao import closed_forms, kernels
from ptqao.classical import classical_hamiltonian, hamiltonian_flow, pdm_mass_profile
from ptqao.equivalence import Quartic, assemble_h
from ptqao.errors import NegativeLambdaError, NonConvergence
from ptqao.metric import ProblemParams, random_params
from ptqao.series import EpsilonSeries
from ptqao.weyl import PhaseSpacePolynomial, WeylOperator, X

UNIT = ProblemParams(1, 1, 1)


def _hc(p=UNIT, order=4):
    return classical_hamiltonian(assemble_h(p, order))


def test_orders_match_closed_form():
    rng = random.Random(21)
    for p in [UNIT, ProblemParams(2, Fraction(-1, 3), 0)] + [random_params(rng) for _ in range(3)]:
        assert _hc(p).orders == closed_forms.classical_hamiltonian(p)


def test_trivial_order():
    assert _hc(ProblemParams(3, 1, 1), 2).orders[0] == PhaseSpacePolynomial(
        {(0, 2, 0): Fraction(1, 2), (2, 0, 0): 3}
    )


def test_negative_lambda_rejected():
    bad = EpsilonSeries({0: X * X, 1: WeylOperator.monomial(0, 3, 1, lam_pow=-1)}, 4)
    with pytest.raises(NegativeLambdaError):
        classical_hamiltonian(bad)


def test_mass_profile():
    p = ProblemParams(1, 2, 3)
    mass, quad, cls = pdm_mass_profile(p, 0.05)
    assert cls.kind is Quartic.NULL
    assert mass(0.0) == 1.0
    xs = np.linspace(-1, 1, 201)
    for params in (UNIT, p, ProblemParams(Fraction(1, 2), -3, 0)):
        for eps in (0.01, 0.05, 0.1):
            mass, quad, _ = pdm_mass_profile(params, eps)
            c = (3 * float(params.beta) ** 2 / (2 * float(params.alpha) ** 2)) ** 2
            assert np.all(np.abs(mass(xs) - quad(xs)) <= c * eps ** 4 * xs ** 4 + 1e-15)
    with pytest.raises(ValueError):
        pdm_mass_profile(p, -0.1)


def test_pdm_reading_at_second_order():
    for p in (UNIT, ProblemParams(Fraction(3, 2), Fraction(-2, 5), Fraction(7, 3))):
        a, b, c = p.alpha, p.beta, p.gamma
        k = 3 * b * b / (2 * a * a)
        # 1/m = 1 + eps^2 k x^2, so its eps^2 kinetic part is k x^2 p^2 / 2
        expected = PhaseSpacePolynomial({(2, 2, 0): k / 2, (4, 0, 0): (3 * b * b - 4 * a * c) / (4 * a)})
        assert _hc(p).orders[2] == expected


def test_reversal_invariance():
    hc = _hc()
    assert hc.is_time_reversal_even()
    xs, ps = np.array([0.3, -0.7]), np.array([1.1, 0.2])
    np.testing.assert_allclose(hc.energy(0.03, xs, ps), hc.energy(0.03, -xs, -ps))


def test_harmonic_tracks_cosine():
    hc = _hc(ProblemParams(Fraction(1, 2), 1, 1))
    rec = hamiltonian_flow(hc, 0.0, (1.0, 0.0), 1e-3, 10_000)
    assert np.max(np.abs(rec.x - np.cos(rec.t))) <= 1e-6
    assert np.all(np.diff(rec.t) > 0)
    assert rec.relative_energy_drift() <= 1e-10


def test_anharmonic_drift_and_reversibility():
    hc = _hc()
    rec = hamiltonian_flow(hc, 0.02, (1.0, 0.0), 1e-3, 10_000)
    assert rec.relative_energy_drift() <= 1e-8
    fwd = hamiltonian_flow(hc, 0.02, (1.0, 0.0), 1e-3, 1000)
    back = hamiltonian_flow(hc, 0.02, (fwd.x[-1], fwd.p[-1]), -1e-3, 1000)
    assert abs(back.x[-1] - 1.0) <= 1e-10 and abs(back.p[-1]) <= 1e-10


def test_large_step_reports_index():
    with pytest.raises(NonConvergence) as info:
        hamiltonian_flow(_hc(), 0.02, (1.0, 0.0), 1.0, 100)
    assert info.value.step == 0
    with pytest.raises(ValueError):
        hamiltonian_flow(_hc(), 0.02, (1.0, 0.0), 0.0, 10)


@pytest.mark.skipif(not kernels.USE_NUMBA, reason="numba disabled")
def test_backends_agree():
    hc = _hc()
    a = hamiltonian_flow(hc, 0.04, (0.8, 0.3), 1e-3, 2000, backend="numba")
    b = hamiltonian_flow(hc, 0.04, (0.8, 0.3), 1e-3, 2000, backend="numpy")
    np.testing.assert_allclose(a.x, b.x, atol=1e-12)
    np.testing.assert_allclose(a.p, b.p, atol=1e-12)


def test_kernel_polynomials_agree():
    coef, xpow, ppow = _hc().arrays(0.05)
    for x, p in [(0.3, -1.2), (1.5, 0.4)]:
        v = kernels.poly_value_loop(coef, xpow, ppow, x, p)
        assert v == pytest.approx(kernels.poly_value_numpy(coef, xpow, ppow, x, p))
        g = kernels.poly_gradient_loop(coef, xpow, ppow, x, p)
        np.testing.assert_allclose(g, kernels.poly_gradient_numpy(coef, xpow, ppow, x, p))


def test_env_flag_selects_fallback():
    import os
    import subprocess
    import sys

    code = (
        "from ptqao import kernels;"
        "from ptqao.classical import classical_hamiltonian, hamiltonian_flow;"
        "from ptqao.equivalence import assemble_h;"
        "from ptqao.metric import ProblemParams;"
        "hc = classical_hamiltonian(assemble_h(ProblemParams(1, 1, 1), 4));"
        "r = hamiltonian_flow(hc, 0.02, (1.0, 0.0), 1e-3, 200);"
        "print(kernels.USE_NUMBA, repr(float(r.x[-1])))"
    )
    env = dict(os.environ, PTQAO_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    flag, x_end = out.stdout.split()
    assert flag == "False"
    ref = hamiltonian_flow(_hc(), 0.02, (1.0, 0.0), 1e-3, 200)
    assert float(x_end) == pytest.approx(ref.x[-1], abs=1e-13)
