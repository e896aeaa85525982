"""Command-line front end: ``ptqao solve|verify|spectrum|classical``.

Exit codes: 0 success, 1 verification/acceptance failure, 2 configuration
error, 3 solver error, 4 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from . import closed_forms
from .classical import classical_hamiltonian, hamiltonian_flow
from .equivalence import (
    Quartic,
    assemble_h,
    classify_quartic,
    extract_pdm,
    h_order2,
    h_order4,
    physical_momentum,
    physical_position,
    pseudo_hermiticity_residual,
    w_relations,
)
from .errors import InvalidParams, NonConvergence, SolverError
from .metric import (
    ProblemParams,
    build_hamiltonian,
    s_decomposition,
    solve_q1,
    solve_q3,
    verify_s_recursion,
)
from .series import EpsilonSeries
from .spectral import BasisSpec, spectrum_comparison, truncation_shift
from .weyl import WeylOperator

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_NUMERIC = 4

SLOPE2_WINDOW = (3.6, 4.4)
SLOPE4_WINDOW = (5.4, 6.6)
DRIFT_BOUND = 1e-8


class ConfigError(ValueError):
    pass


def _rational(name: str, value) -> Fraction:
    try:
        if isinstance(value, float):
            raise ValueError("give rationals as strings, e.g. \"3/2\"")
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{name}: malformed rational {value!r} ({exc})") from None


def _positive_int(name: str, value) -> int:
    try:
        out = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected an integer, got {value!r}") from None
    if out < 1 or str(out) != str(value).strip():
        raise ConfigError(f"{name}: expected a positive integer, got {value!r}")
    return out


def _epsilon_list(value) -> tuple:
    if isinstance(value, str):
        items = [v for v in value.split(",") if v.strip()]
    else:
        items = list(value)
    try:
        out = tuple(float(v) for v in items)
    except (TypeError, ValueError):
        raise ConfigError(f"epsilon: malformed list {value!r}") from None
    if not out or any(not math.isfinite(e) or e < 0 for e in out):
        raise ConfigError(f"epsilon: values must be finite and non-negative, got {value!r}")
    return out


@dataclass(frozen=True)
class RunConfig:
    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(1)
    gamma: Fraction = Fraction(1)
    epsilon: tuple = (0.005, 0.01, 0.02, 0.04)
    basis_n: int = 80
    basis_buffer: int = 24
    levels: int = 8
    max_order: int = 4
    out: str = "."

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        kw = {}
        for name in ("alpha", "beta", "gamma"):
            if name in data:
                kw[name] = _rational(name, data[name])
        if "epsilon" in data:
            kw["epsilon"] = _epsilon_list(data["epsilon"])
        for name in ("basis_n", "basis_buffer", "levels", "max_order"):
            if name in data:
                kw[name] = _positive_int(name, data[name])
        if "out" in data:
            kw["out"] = str(data["out"])
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    def validate(self):
        try:
            self.params()
        except InvalidParams as exc:
            raise ConfigError(str(exc)) from None
        if self.max_order not in (2, 4):
            raise ConfigError("max_order: must be 2 or 4")

    def params(self) -> ProblemParams:
        return ProblemParams(self.alpha, self.beta, self.gamma)

    def to_mapping(self) -> dict:
        d = asdict(self)
        for name in ("alpha", "beta", "gamma"):
            d[name] = str(d[name])
        d["epsilon"] = list(self.epsilon)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_mapping(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError("config: expected a flat JSON object")
        return cls.from_mapping(data)


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(name: str, op, out):
    print(f"{name} = {op.to_text()}", file=out)
    if isinstance(op, WeylOperator):
        print(f"{name}[l=1] = {op.substitute_lambda(1).to_text(show_lambda=False)}", file=out)


def run_solve(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    params = cfg.params()
    q1 = solve_q1(params)
    q3 = solve_q3(params, q1)
    h2 = h_order2(params, q1)
    pdm = extract_pdm(h2)
    _emit("Q1", q1, out)
    _emit("Q3", q3, out)
    _emit("h2", h2, out)
    if cfg.max_order == 4:
        _emit("h4", h_order4(params, q1, q3), out)
    _emit("M2", pdm.mass_correction, out)
    _emit("Veff2", pdm.effective_potential, out)
    q = EpsilonSeries({1: q1, 3: q3}, 4)
    for label, series in (("x_phys", physical_position(params, q)),
                          ("p_phys", physical_momentum(params, q))):
        for k in range(4):
            _emit(f"{label}[eps^{k}]", series[k], out)
    hc = classical_hamiltonian(assemble_h(params, cfg.max_order))
    for k in sorted(hc.orders):
        _emit(f"Hc[eps^{k}]", hc.orders[k], out)
    cls = classify_quartic(params)
    print(f"quartic = {cls.kind.value} (discriminant {cls.discriminant})", file=out)
    return EXIT_OK


@dataclass
class Check:
    identifier: str
    expected: str
    computed: str
    passed: bool


@dataclass
class VerificationReport:
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, identifier, expected, computed, passed=None):
        expected, computed = str(expected), str(computed)
        if passed is None:
            passed = expected == computed
        self.checks.append(Check(identifier, expected, computed, bool(passed)))

    def to_json(self) -> str:
        data = {"overall": "pass" if self.passed else "fail",
                "checks": [asdict(c) for c in self.checks]}
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _text(ops) -> str:
    return " | ".join(op.to_text() for op in ops)


def build_verification(cfg: RunConfig, flip_sign: bool = False) -> VerificationReport:
    params = cfg.params()
    report = VerificationReport()
    q1 = solve_q1(params, flip_sign=flip_sign)
    q3 = solve_q3(params, q1)
    q1_unit = q1.substitute_lambda(1)

    s = s_decomposition(q1_unit)
    report.add("s_values", _text(closed_forms.s_values(params)), _text(s.s))
    residuals = verify_s_recursion(s, params)
    report.add("s_recursion", "0", _text(residuals.values()),
               all(r.is_zero() for r in residuals.values()))

    h2 = h_order2(params, q1)
    pdm = extract_pdm(h2)
    report.add("pdm_mass", closed_forms.mass_correction(params).to_text(),
               pdm.mass_correction.to_text())
    report.add("pdm_potential", closed_forms.effective_potential(params).to_text(),
               pdm.effective_potential.to_text())
    pdm_unit = pdm.substitute_lambda(1)
    w = w_relations(s, params, pdm_unit)
    report.add("w_relations", "0", _text(w.values()), all(r.is_zero() for r in w.values()))

    report.add("h_order4", closed_forms.h_order4(params).to_text(),
               h_order4(params, q1, q3).to_text())

    q = EpsilonSeries({1: q1, 3: q3}, 4)
    for label, got, want in (
        ("x_phys", physical_position(params, q), closed_forms.position_series(params)),
        ("p_phys", physical_momentum(params, q), closed_forms.momentum_series(params)),
    ):
        for k in range(4):
            report.add(f"{label}_eps{k}", want[k].to_text(), got[k].to_text())

    h = assemble_h(params, 4)
    hc = classical_hamiltonian(h)
    for k, want in closed_forms.classical_hamiltonian(params).items():
        got = hc.orders.get(k)
        report.add(f"classical_eps{k}", want.to_text(), got.to_text() if got else "0")
    lam_const = h[2].coefficient(0, 0).get(2)
    report.add("hbar_constant", -params.beta ** 2 / (2 * params.alpha ** 2),
               lam_const.re if lam_const is not None else 0)

    resid = pseudo_hermiticity_residual(build_hamiltonian(params), q, 4)
    report.add("pseudo_hermiticity", "0", repr(resid), resid.is_zero())

    cls = classify_quartic(params)
    x4 = pdm.effective_potential.coefficient(4, 0).get(0)
    x4 = x4.re if x4 is not None else Fraction(0)
    sign_kind = {1: Quartic.ATTRACTIVE, 0: Quartic.NULL, -1: Quartic.REPULSIVE}[
        (x4 * 4 * params.alpha > 0) - (x4 * 4 * params.alpha < 0)
    ]
    report.add("quartic_classification",
               f"{cls.kind.value} (discriminant {cls.discriminant})",
               f"{sign_kind.value} (discriminant {x4 * 4 * params.alpha})")
    return report


def run_verify(cfg: RunConfig, flip_sign: bool = False, out=None) -> int:
    out = out or sys.stdout
    report = build_verification(cfg, flip_sign)
    for c in report.checks:
        if c.passed:
            print(f"PASS {c.identifier}", file=out)
        else:
            print(f"FAIL {c.identifier}\n  expected: {c.expected}\n  computed: {c.computed}",
                  file=out)
    print(f"overall: {'pass' if report.passed else 'fail'}", file=out)
    _atomic_write(Path(cfg.out) / "verification.json", report.to_json())
    return EXIT_OK if report.passed else EXIT_FAIL


def _fmt(v: Optional[float]) -> str:
    return "NA" if v is None else repr(float(v))


def spectrum_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["epsilon", "max_imag", "dev_order2", "dev_order4"])
    for row in report.rows():
        writer.writerow([repr(float(v)) for v in row])
    buf.write(f"# slope2={_fmt(report.slope2)} slope4={_fmt(report.slope4)}\n")
    return buf.getvalue()


def run_spectrum(cfg: RunConfig, out=None, gate: bool = True) -> int:
    out = out or sys.stdout
    eps = list(cfg.epsilon)
    if any(not 1e-3 <= e <= 0.1 for e in eps):
        raise ConfigError("epsilon: spectrum grid must lie within [0.001, 0.1]")
    if eps != sorted(set(eps)):
        raise ConfigError("epsilon: grid must be strictly increasing")
    try:
        basis = BasisSpec(float(cfg.alpha), cfg.basis_n, cfg.basis_buffer)
    except ValueError as exc:
        raise ConfigError(f"basis: {exc}") from None
    if cfg.levels > basis.n // 8:
        raise ConfigError("levels: must not exceed basis_n/8")
    params = cfg.params()
    report = spectrum_comparison(params, eps, cfg.levels, basis)
    _atomic_write(Path(cfg.out) / "spectrum.csv", spectrum_csv(report))
    print(f"slope2={_fmt(report.slope2)} slope4={_fmt(report.slope4)} "
          f"max_imag={max(report.max_imag)!r}", file=out)
    if gate:
        n_big = cfg.basis_n + 40
        larger = BasisSpec(float(cfg.alpha), n_big, max(cfg.basis_buffer, -(-n_big // 4)))
        shift = truncation_shift(params, eps, cfg.levels, basis, larger)
        status = "ok" if shift < 1e-8 else "FAILED"
        print(f"truncation_shift(N={cfg.basis_n}->{n_big})={shift!r} [{status}]", file=out)
    if report.slope2 is None or report.slope4 is None:
        print("warning: fewer than two usable epsilon values; slopes not available", file=out)
        return EXIT_OK
    ok = (SLOPE2_WINDOW[0] <= report.slope2 <= SLOPE2_WINDOW[1]
          and SLOPE4_WINDOW[0] <= report.slope4 <= SLOPE4_WINDOW[1])
    return EXIT_OK if ok else EXIT_FAIL


def trajectory_csv(record) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "x", "p", "H"])
    for row in record.rows():
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def run_classical(cfg: RunConfig, x0=1.0, p0=0.0, dt=1e-3, steps=10_000, out=None) -> int:
    out = out or sys.stdout
    if dt <= 0 or steps < 1:
        raise ConfigError("dt must be positive and steps >= 1")
    eps = cfg.epsilon[0]
    hc = classical_hamiltonian(assemble_h(cfg.params(), cfg.max_order))
    record = hamiltonian_flow(hc, eps, (x0, p0), dt, steps)
    _atomic_write(Path(cfg.out) / "trajectory.csv", trajectory_csv(record))
    drift = record.relative_energy_drift()
    print(f"epsilon={eps!r} steps={steps} dt={dt!r} energy_drift={drift!r}", file=out)
    return EXIT_OK if drift <= DRIFT_BOUND else EXIT_FAIL


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON config file")
    common.add_argument("--alpha")
    common.add_argument("--beta")
    common.add_argument("--gamma")
    common.add_argument("--epsilon", help="comma-separated list")
    common.add_argument("--basis-n", dest="basis_n")
    common.add_argument("--basis-buffer", dest="basis_buffer")
    common.add_argument("--levels")
    common.add_argument("--max-order", dest="max_order")
    common.add_argument("--out")

    parser = argparse.ArgumentParser(prog="ptqao", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="print metric, h orders, observables")
    v = sub.add_parser("verify", parents=[common], help="run the golden checks")
    v.add_argument("--debug-flip-sign", action="store_true",
                   help="flip the sign of the first-order right-hand side")
    sub.add_parser("spectrum", parents=[common], help="spectral order-scaling study")
    c = sub.add_parser("classical", parents=[common], help="integrate the classical limit")
    c.add_argument("--x0", type=float, default=1.0)
    c.add_argument("--p0", type=float, default=0.0)
    c.add_argument("--dt", type=float, default=1e-3)
    c.add_argument("--steps", type=int, default=10_000)
    return parser


_CONFIG_KEYS = ("alpha", "beta", "gamma", "epsilon", "basis_n", "basis_buffer", "levels",
                "max_order", "out")


def load_config(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config} ({exc})") from None
        data.update(RunConfig.from_json(text).to_mapping())
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return RunConfig.from_mapping(data)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "solve":
            return run_solve(cfg)
        if args.command == "verify":
            return run_verify(cfg, flip_sign=args.debug_flip_sign)
        if args.command == "spectrum":
            return run_spectrum(cfg)
        return run_classical(cfg, args.x0, args.p0, args.dt, args.steps)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except NonConvergence as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
