"""Truncated oscillator-basis numerics for the PT Hamiltonian and its Hermitian partner.

Operators are built at dimension ``N + B`` and truncated to the leading
``N x N`` block, so matrix products of degree up to ``B`` are exact there.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .equivalence import assemble_h
from .errors import NonConvergence
from .metric import ProblemParams, build_hamiltonian, metric_generator
from .weyl import WeylOperator

__all__ = [
    "BasisSpec",
    "oscillator_matrices",
    "to_matrix",
    "eigen_hermitian",
    "eigen_complex",
    "SpectralReport",
    "spectrum_comparison",
    "truncation_shift",
    "metric_residual_matrix",
    "fit_slope",
]


@dataclass(frozen=True)
class BasisSpec:
    alpha: float
    n: int = 80
    buffer: int = 24

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.n < 8:
            raise ValueError("basis dimension must be at least 8")
        if 4 * self.buffer < self.n:
            raise ValueError("buffer must be at least n/4")

    @property
    def omega(self) -> float:
        return float(np.sqrt(2.0 * self.alpha))

    @property
    def full_dim(self) -> int:
        return self.n + self.buffer


def oscillator_matrices(basis: BasisSpec) -> Tuple[np.ndarray, np.ndarray]:
    """X and P in the eigenbasis of ``P^2/2 + alpha X^2`` (lam = 1), size N+B."""
    m = basis.full_dim
    w = basis.omega
    a = np.diag(np.sqrt(np.arange(1, m, dtype=float)), 1)
    ad = a.T
    xmat = (a + ad) / np.sqrt(2.0 * w)
    pmat = 1j * np.sqrt(w / 2.0) * (ad - a)
    return xmat.astype(complex), pmat


class _PowerCache:
    def __init__(self, basis: BasisSpec):
        self.xmat, self.pmat = oscillator_matrices(basis)
        eye = np.eye(basis.full_dim, dtype=complex)
        self._x = {0: eye}
        self._p = {0: eye}

    def x(self, k):
        if k not in self._x:
            self._x[k] = self.x(k - 1) @ self.xmat
        return self._x[k]

    def p(self, k):
        if k not in self._p:
            self._p[k] = self.p(k - 1) @ self.pmat
        return self._p[k]


_CACHES: Dict[BasisSpec, _PowerCache] = {}


def _cache(basis: BasisSpec) -> _PowerCache:
    c = _CACHES.get(basis)
    if c is None:
        if len(_CACHES) > 8:
            _CACHES.clear()
        c = _CACHES[basis] = _PowerCache(basis)
    return c


def to_matrix(op: WeylOperator, basis: BasisSpec, truncate: bool = True) -> np.ndarray:
    """Dense matrix of a lam-free operator (use ``substitute_lambda(op, 1)`` first)."""
    if any(k != 0 for (_, _, k), _ in op.items()):
        raise ValueError("operator still carries symbolic lam; substitute a value first")
    cache = _cache(basis)
    out = np.zeros((basis.full_dim, basis.full_dim), dtype=complex)
    for (a, b, _), c in op.items():
        out += complex(c) * (cache.x(a) @ cache.p(b))
    return out[: basis.n, : basis.n] if truncate else out


def eigen_hermitian(mat: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (LAPACK tridiagonal path)."""
    mat = np.asarray(mat)
    _check_square(mat)
    try:
        return np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f"Hermitian eigensolver failed: {exc}") from exc


def eigen_complex(mat: np.ndarray) -> np.ndarray:
    """Eigenvalues of a general matrix sorted by real part, then imaginary part."""
    mat = np.asarray(mat)
    _check_square(mat)
    try:
        vals = np.linalg.eigvals(mat)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f"general eigensolver failed: {exc}") from exc
    vals = np.asarray(vals, dtype=complex)
    # real parts equal up to roundoff tie-break on the imaginary part
    scale = max(1.0, float(np.max(np.abs(vals)))) if vals.size else 1.0
    key = np.round(vals.real / scale, 10)
    return vals[np.lexsort((vals.imag, key))]


def _check_square(mat):
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix has non-finite entries")


def fit_slope(eps: Sequence[float], values: Sequence[float]) -> Optional[float]:
    """Least-squares slope of log(values) against log(eps); None with < 2 usable points."""
    pts = [(e, v) for e, v in zip(eps, values) if e > 0 and v > 0]
    if len(pts) < 2:
        return None
    le = np.log([e for e, _ in pts])
    lv = np.log([v for _, v in pts])
    return float(np.polyfit(le, lv, 1)[0])


@dataclass
class SpectralReport:
    epsilon: List[float] = field(default_factory=list)
    max_imag: List[float] = field(default_factory=list)
    dev_order2: List[float] = field(default_factory=list)
    dev_order4: List[float] = field(default_factory=list)
    slope2: Optional[float] = None
    slope4: Optional[float] = None

    def rows(self):
        return zip(self.epsilon, self.max_imag, self.dev_order2, self.dev_order4)


class _OrderMatrices:
    """lam = 1 matrices of each eps order of H and h for one basis."""

    def __init__(self, params: ProblemParams, basis: BasisSpec):
        H = build_hamiltonian(params)
        h = assemble_h(params, 4)
        self.H = {k: to_matrix(op.substitute_lambda(1), basis) for k, op in H.items()}
        self.h = {k: to_matrix(op.substitute_lambda(1), basis) for k, op in h.items()}

    @staticmethod
    def combine(parts, eps, max_order=None):
        out = None
        for k, m in parts.items():
            if max_order is not None and k > max_order:
                continue
            term = (eps ** k) * m
            out = term if out is None else out + term
        return out

    def H_at(self, eps):
        return self.combine(self.H, eps)

    def h_at(self, eps, order):
        return self.combine(self.h, eps, order)


def spectrum_comparison(
    params: ProblemParams,
    eps_grid: Sequence[float],
    n_levels: int = 8,
    basis: Optional[BasisSpec] = None,
) -> SpectralReport:
    """Compare low-lying spectra of H(eps) and of h truncated at eps^2 and eps^4."""
    basis = basis or BasisSpec(float(params.alpha))
    if list(eps_grid) != sorted(set(eps_grid)):
        raise ValueError("eps grid must be strictly increasing")
    if n_levels > basis.n // 8:
        raise ValueError("n_levels must not exceed N/8")
    mats = _OrderMatrices(params, basis)
    report = SpectralReport()
    for eps in eps_grid:
        eH = eigen_complex(mats.H_at(eps))[:n_levels]
        e2 = eigen_hermitian(mats.h_at(eps, 2))[:n_levels]
        e4 = eigen_hermitian(mats.h_at(eps, 4))[:n_levels]
        report.epsilon.append(float(eps))
        report.max_imag.append(float(np.max(np.abs(eH.imag))))
        report.dev_order2.append(float(np.max(np.abs(eH - e2))))
        report.dev_order4.append(float(np.max(np.abs(eH - e4))))
    report.slope2 = fit_slope(report.epsilon, report.dev_order2)
    report.slope4 = fit_slope(report.epsilon, report.dev_order4)
    return report


def truncation_shift(
    params: ProblemParams,
    eps_grid: Sequence[float],
    n_levels: int,
    basis: BasisSpec,
    larger: BasisSpec,
) -> float:
    """Largest change of the lowest levels of H(eps) between two basis sizes."""
    small = _OrderMatrices(params, basis)
    big = _OrderMatrices(params, larger)
    shift = 0.0
    for eps in eps_grid:
        a = eigen_complex(small.H_at(eps))[:n_levels]
        b = eigen_complex(big.H_at(eps))[:n_levels]
        shift = max(shift, float(np.max(np.abs(a - b))))
    return shift


def metric_residual_matrix(
    params: ProblemParams,
    eps: float,
    basis: Optional[BasisSpec] = None,
    return_eta: bool = False,
):
    """Frobenius norm of ``H^dagger eta - eta H`` with ``eta = exp(-eps Q1 - eps^3 Q3)``.

    ``eta`` is formed at the buffered dimension through a Hermitian
    eigendecomposition; the products and the norm use the leading N x N block.
    """
    if not 0 < eps <= 0.1:
        raise ValueError("eps must lie in (0, 0.1]")
    basis = basis or BasisSpec(float(params.alpha), n=8, buffer=16)
    q = metric_generator(params, 3)
    qmat = eps * to_matrix(q[1].substitute_lambda(1), basis, truncate=False)
    qmat = qmat + eps ** 3 * to_matrix(q[3].substitute_lambda(1), basis, truncate=False)
    qmat = 0.5 * (qmat + qmat.conj().T)
    w, v = np.linalg.eigh(qmat)
    eta = (v * np.exp(-w)) @ v.conj().T
    H = build_hamiltonian(params)
    hmat = sum(
        (eps ** k) * to_matrix(op.substitute_lambda(1), basis, truncate=False) for k, op in H.items()
    )
    n = basis.n
    resid = (hmat.conj().T @ eta - eta @ hmat)[:n, :n]
    norm = float(np.linalg.norm(resid))
    if return_eta:
        return norm, eta[:n, :n], np.exp(-w)
    return norm
