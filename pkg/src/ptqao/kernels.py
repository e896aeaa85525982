"""Hot numeric loops, compiled with numba when available.

Set ``PTQAO_DISABLE_NUMBA=1`` to force the pure numpy/Python path.  Both
paths run the same algorithm and agree to rounding.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and os.environ.get("PTQAO_DISABLE_NUMBA", "0") not in ("1", "true", "yes")

# Fixed-point status codes returned by the integrator kernels.
OK = 0
NOT_CONVERGED = 1


def poly_gradient_loop(coef, xpow, ppow, x, p):
    """(dH/dx, dH/dp) for H = sum coef[i] x^xpow[i] p^ppow[i]."""
    dx = 0.0
    dp = 0.0
    for i in range(coef.shape[0]):
        a = xpow[i]
        b = ppow[i]
        c = coef[i]
        if a > 0:
            dx += c * a * x ** (a - 1) * p ** b
        if b > 0:
            dp += c * b * x ** a * p ** (b - 1)
    return dx, dp


def poly_value_loop(coef, xpow, ppow, x, p):
    total = 0.0
    for i in range(coef.shape[0]):
        total += coef[i] * x ** xpow[i] * p ** ppow[i]
    return total


def midpoint_loop(coef, xpow, ppow, x0, p0, dt, steps, tol, max_iter):
    """Implicit midpoint rule solved by fixed-point iteration.

    Returns (xs, ps, status, failed_step); ``failed_step`` is -1 on success.
    """
    xs = np.empty(steps + 1)
    ps = np.empty(steps + 1)
    xs[0] = x0
    ps[0] = p0
    x = x0
    p = p0
    for n in range(steps):
        xn = x
        pn = p
        converged = False
        for _ in range(max_iter):
            xm = 0.5 * (x + xn)
            pm = 0.5 * (p + pn)
            gx, gp = poly_gradient_loop(coef, xpow, ppow, xm, pm)
            x_new = x + dt * gp
            p_new = p - dt * gx
            if not (np.isfinite(x_new) and np.isfinite(p_new)):
                break
            delta = max(abs(x_new - xn), abs(p_new - pn))
            xn = x_new
            pn = p_new
            if delta <= tol * max(1.0, abs(xn), abs(pn)):
                converged = True
                break
        if not converged:
            return xs, ps, NOT_CONVERGED, n
        x = xn
        p = pn
        xs[n + 1] = x
        ps[n + 1] = p
    return xs, ps, OK, -1


def poly_value_numpy(coef, xpow, ppow, x, p):
    """Vectorized polynomial value over arrays of states."""
    x = np.asarray(x, dtype=float)[..., None]
    p = np.asarray(p, dtype=float)[..., None]
    return np.sum(coef * x ** xpow * p ** ppow, axis=-1)


def poly_gradient_numpy(coef, xpow, ppow, x, p):
    dx_terms = np.where(xpow > 0, coef * xpow * x ** np.maximum(xpow - 1, 0) * p ** ppow, 0.0)
    dp_terms = np.where(ppow > 0, coef * ppow * x ** xpow * p ** np.maximum(ppow - 1, 0), 0.0)
    return float(dx_terms.sum()), float(dp_terms.sum())


def midpoint_numpy(coef, xpow, ppow, x0, p0, dt, steps, tol, max_iter):
    xs = np.empty(steps + 1)
    ps = np.empty(steps + 1)
    xs[0], ps[0] = x0, p0
    x, p = x0, p0
    xpow = xpow.astype(float)
    ppow = ppow.astype(float)
    for n in range(steps):
        xn, pn = x, p
        converged = False
        for _ in range(max_iter):
            gx, gp = poly_gradient_numpy(coef, xpow, ppow, 0.5 * (x + xn), 0.5 * (p + pn))
            x_new = x + dt * gp
            p_new = p - dt * gx
            if not (np.isfinite(x_new) and np.isfinite(p_new)):
                break
            delta = max(abs(x_new - xn), abs(p_new - pn))
            xn, pn = x_new, p_new
            if delta <= tol * max(1.0, abs(xn), abs(pn)):
                converged = True
                break
        if not converged:
            return xs, ps, NOT_CONVERGED, n
        x, p = xn, pn
        xs[n + 1], ps[n + 1] = x, p
    return xs, ps, OK, -1


if USE_NUMBA:
    poly_gradient_loop = numba.njit(poly_gradient_loop)
    poly_value_loop = numba.njit(poly_value_loop)
    midpoint_loop = numba.njit(midpoint_loop)


def midpoint(coef, xpow, ppow, x0, p0, dt, steps, tol=1e-13, max_iter=50, backend=None):
    """Dispatch to the numba kernel or the numpy fallback."""
    backend = backend or ("numba" if USE_NUMBA else "numpy")
    coef = np.ascontiguousarray(coef, dtype=float)
    xpow = np.ascontiguousarray(xpow, dtype=np.int64)
    ppow = np.ascontiguousarray(ppow, dtype=np.int64)
    if backend == "numba":
        if not USE_NUMBA:
            raise RuntimeError("numba backend requested but disabled")
        return midpoint_loop(coef, xpow, ppow, float(x0), float(p0), float(dt), int(steps),
                             float(tol), int(max_iter))
    if backend == "numpy":
        return midpoint_numpy(coef, xpow, ppow, float(x0), float(p0), float(dt), int(steps),
                              float(tol), int(max_iter))
    raise ValueError(f"unknown backend {backend!r}")


def energies(coef, xpow, ppow, xs, ps):
    return poly_value_numpy(np.asarray(coef, float), np.asarray(xpow, float),
                            np.asarray(ppow, float), xs, ps)
