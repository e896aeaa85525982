"""Graded perturbation series in a small parameter eps, with operator coefficients."""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Dict, Iterator, Mapping, Tuple

from .errors import TruncationError
from .weyl import WeylOperator, ZERO, commutator

__all__ = ["EpsilonSeries", "TruncationError", "bch_conjugate"]


class EpsilonSeries:
    """``sum_k eps^k A_k`` truncated at ``eps^truncation``.

    Zero components are not stored and powers above the truncation order are
    silently dropped, both on construction and in arithmetic.
    """

    __slots__ = ("_parts", "truncation")

    def __init__(self, parts: Mapping[int, WeylOperator] = None, truncation: int = 4):
        if truncation < 0:
            raise ValueError("truncation order must be non-negative")
        self.truncation = int(truncation)
        self._parts: Dict[int, WeylOperator] = {}
        for k, op in (parts or {}).items():
            if k < 0:
                raise ValueError("eps powers must be non-negative")
            if k <= self.truncation and not op.is_zero():
                self._parts[int(k)] = op

    def __getitem__(self, k: int) -> WeylOperator:
        return self._parts.get(k, ZERO)

    def component(self, k: int) -> WeylOperator:
        return self[k]

    def powers(self) -> Tuple[int, ...]:
        return tuple(sorted(self._parts))

    def items(self) -> Iterator[Tuple[int, WeylOperator]]:
        for k in self.powers():
            yield k, self._parts[k]

    def is_zero(self) -> bool:
        return not self._parts

    def truncate(self, order: int) -> "EpsilonSeries":
        return EpsilonSeries(self._parts, min(order, self.truncation))

    def __eq__(self, other):
        if not isinstance(other, EpsilonSeries):
            return NotImplemented
        return self._parts == other._parts and self.truncation == other.truncation

    def __add__(self, other: "EpsilonSeries") -> "EpsilonSeries":
        trunc = min(self.truncation, other.truncation)
        parts = dict(self._parts)
        for k, op in other._parts.items():
            parts[k] = parts.get(k, ZERO) + op
        return EpsilonSeries(parts, trunc)

    def __neg__(self):
        return EpsilonSeries({k: -op for k, op in self._parts.items()}, self.truncation)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "EpsilonSeries":
        return EpsilonSeries({k: op.scale(factor) for k, op in self._parts.items()}, self.truncation)

    def __mul__(self, other):
        if not isinstance(other, EpsilonSeries):
            return self.scale(other)
        trunc = min(self.truncation, other.truncation)
        parts: Dict[int, WeylOperator] = {}
        for i, a in self._parts.items():
            for j, b in other._parts.items():
                if i + j <= trunc:
                    parts[i + j] = parts.get(i + j, ZERO) + a * b
        return EpsilonSeries(parts, trunc)

    def map(self, fn) -> "EpsilonSeries":
        return EpsilonSeries({k: fn(op) for k, op in self._parts.items()}, self.truncation)

    def commutator(self, other: "EpsilonSeries") -> "EpsilonSeries":
        trunc = min(self.truncation, other.truncation)
        parts: Dict[int, WeylOperator] = {}
        for i, a in self._parts.items():
            for j, b in other._parts.items():
                if i + j <= trunc:
                    parts[i + j] = parts.get(i + j, ZERO) + commutator(a, b)
        return EpsilonSeries(parts, trunc)

    @classmethod
    def constant(cls, op: WeylOperator, truncation: int = 4) -> "EpsilonSeries":
        return cls({0: op}, truncation)

    def __repr__(self):
        inner = ", ".join(f"{k}: {op.to_text()}" for k, op in self.items())
        return f"EpsilonSeries({{{inner}}}, truncation={self.truncation})"


def bch_conjugate(H: EpsilonSeries, Q: EpsilonSeries, s, order: int) -> EpsilonSeries:
    """``exp(s Q) H exp(-s Q)`` expanded as ``sum_n s^n/n! ad_Q^n H`` through eps^order.

    ``Q`` must carry only odd eps powers (so in particular no eps^0 part, which
    keeps the nested-commutator sum finite).
    """
    if order > H.truncation or order > Q.truncation:
        raise TruncationError(
            f"order {order} exceeds truncation (H: {H.truncation}, Q: {Q.truncation})"
        )
    if any(k % 2 == 0 for k in Q.powers()):
        raise ValueError("generator must contain only odd powers of eps")
    s = Fraction(s)
    H = H.truncate(order)
    Q = Q.truncate(order)
    result = H
    term = H
    if s == 0 or Q.is_zero():
        return result
    for n in range(1, order + 1):
        term = Q.commutator(term)
        if term.is_zero():
            break
        result = result + term.scale(s ** n / factorial(n))
    return result
