"""Classical limit of the equivalent Hamiltonian and its trajectories."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Tuple

import numpy as np

from . import kernels
from .equivalence import QuarticClassification, classify_quartic
from .errors import NegativeLambdaError, NonConvergence
from .metric import ProblemParams
from .series import EpsilonSeries
from .weyl import PhaseSpacePolynomial, weyl_symbol

__all__ = [
    "ClassicalHamiltonian",
    "TrajectoryRecord",
    "classical_hamiltonian",
    "pdm_mass_profile",
    "hamiltonian_flow",
]


@dataclass(frozen=True)
class ClassicalHamiltonian:
    """eps-graded classical Hamiltonian; ``orders[k]`` multiplies eps^k."""

    orders: Dict[int, PhaseSpacePolynomial]

    def at_epsilon(self, eps: float) -> PhaseSpacePolynomial:
        total = PhaseSpacePolynomial({})
        for k, poly in self.orders.items():
            total = total + poly.scale(Fraction(eps) ** k)
        return total

    def arrays(self, eps: float):
        """(coef, xpow, ppow) float/int arrays for the numeric kernels."""
        poly = self.at_epsilon(eps)
        keys = sorted(k for k, _ in poly.items())
        terms = dict(poly.items())
        coef = np.array([float(terms[k].re) for k in keys], dtype=float)
        xpow = np.array([k[0] for k in keys], dtype=np.int64)
        ppow = np.array([k[1] for k in keys], dtype=np.int64)
        return coef, xpow, ppow

    def energy(self, eps: float, x, p):
        coef, xpow, ppow = self.arrays(eps)
        return kernels.energies(coef, xpow, ppow, x, p)

    def is_time_reversal_even(self) -> bool:
        return all(poly.reflect(-1, -1) == poly for poly in self.orders.values())


def classical_hamiltonian(h: EpsilonSeries) -> ClassicalHamiltonian:
    """Weyl symbol of every eps order with all lam^k (k >= 1) terms dropped."""
    orders = {}
    for k, op in h.items():
        if op.has_negative_lambda():
            raise NegativeLambdaError(f"eps^{k} order carries a negative power of lam")
        sym = weyl_symbol(op)
        if sym.has_negative_lambda():
            raise NegativeLambdaError(f"eps^{k} symbol carries a negative power of lam")
        classical = sym.classical_part()
        if not classical.is_real():
            raise ValueError(f"eps^{k} classical part is not real")
        if not classical.is_zero():
            orders[k] = classical
    return ClassicalHamiltonian(orders)


def pdm_mass_profile(
    params: ProblemParams, eps: float
) -> Tuple[Callable, Callable, QuarticClassification]:
    """Mass function, its quadratic approximation, and the quartic classification."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    k = 3 * float(params.beta) ** 2 / (2 * float(params.alpha) ** 2) * eps ** 2

    def mass(x):
        return 1.0 / (1.0 + k * np.asarray(x, dtype=float) ** 2)

    def mass_quadratic(x):
        return 1.0 - k * np.asarray(x, dtype=float) ** 2

    return mass, mass_quadratic, classify_quartic(params)


@dataclass(frozen=True)
class TrajectoryRecord:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    energy: np.ndarray
    step_size: float
    method: str = "implicit-midpoint"

    def relative_energy_drift(self) -> float:
        e0 = self.energy[0]
        scale = abs(e0) if e0 != 0 else 1.0
        return float(np.max(np.abs(self.energy - e0)) / scale)

    def rows(self):
        return zip(self.t, self.x, self.p, self.energy)


def hamiltonian_flow(
    hc: ClassicalHamiltonian,
    eps: float,
    state0: Tuple[float, float],
    dt: float,
    steps: int,
    tol: float = 1e-13,
    max_iter: int = 50,
    backend: str | None = None,
) -> TrajectoryRecord:
    """Integrate dx/dt = dH/dp, dp/dt = -dH/dx with the implicit midpoint rule.

    ``dt`` may be negative for backward integration; the time column then
    decreases.
    """
    if dt == 0:
        raise ValueError("dt must be nonzero")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    coef, xpow, ppow = hc.arrays(eps)
    xs, ps, status, failed = kernels.midpoint(
        coef, xpow, ppow, state0[0], state0[1], dt, steps, tol, max_iter, backend=backend
    )
    if status != kernels.OK:
        raise NonConvergence(f"fixed-point iteration did not converge at step {failed}", step=failed)
    t = dt * np.arange(steps + 1)
    energy = kernels.energies(coef, xpow, ppow, xs, ps)
    return TrajectoryRecord(t, xs, ps, energy, dt)
