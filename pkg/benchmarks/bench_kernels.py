"""Time the implicit-midpoint kernel: numba vs the numpy fallback.

    python benchmarks/bench_kernels.py [--steps N] [--repeat R]

Both backends integrate the same eps^4 classical Hamiltonian from the same
state; the script reports the best wall time of each and their largest
disagreement.  Set PTQAO_DISABLE_NUMBA=1 to time the fallback only.
"""
import argparse
import time

import numpy as np

from ptqao import kernels
from ptqao.classical import classical_hamiltonian
from ptqao.equivalence import assemble_h
from ptqao.metric import ProblemParams


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--eps", type=float, default=0.02)
    args = ap.parse_args()

    hc = classical_hamiltonian(assemble_h(ProblemParams(1, 1, 1), 4))
    coef, xpow, ppow = hc.arrays(args.eps)

    def run(backend):
        return kernels.midpoint(coef, xpow, ppow, 1.0, 0.0, 1e-3, args.steps, backend=backend)

    results = {}
    backends = ["numpy"] + (["numba"] if kernels.USE_NUMBA else [])
    for name in backends:
        if name == "numba":
            run(name)  # compile outside the timed region
        results[name] = best_time(lambda: run(name), args.repeat)
        print(f"{name:6s} {results[name][0] * 1e3:10.2f} ms  ({args.steps} steps)")

    if len(results) == 2:
        (t_np, a), (t_nb, b) = results["numpy"], results["numba"]
        diff = max(np.max(np.abs(a[0] - b[0])), np.max(np.abs(a[1] - b[1])))
        print(f"speedup {t_np / t_nb:8.1f}x   max |numba - numpy| = {diff:.2e}")


if __name__ == "__main__":
    main()
