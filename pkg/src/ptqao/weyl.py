"""Exact algebra of normal-ordered polynomials in X and P.

The commutation relation is ``[X, P] = i*lam`` with ``lam`` a formal parameter
standing in for hbar.  Every operator is stored in normal order (all X factors
left of all P factors) as a sparse map ``(x_pow, p_pow, lam_pow) -> coefficient``
with exact Gaussian-rational coefficients.  Negative powers of ``lam`` are
allowed.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, Iterable, Mapping, Tuple, Union

__all__ = [
    "GaussianRational",
    "WeylOperator",
    "PhaseSpacePolynomial",
    "LambdaCoefficient",
    "reorder",
    "multiply",
    "commutator",
    "anticommutator",
    "adjoint",
    "pt_transform",
    "is_pt_symmetric",
    "weyl_symbol",
    "weyl_quantize",
    "substitute_lambda",
    "X",
    "P",
    "ONE",
    "ZERO",
]


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, str):
            return cls(Fraction(value))
        return cls(Fraction(value))

    def __add__(self, other):
        other = _as_gr(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gr(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_gr(other) - self

    def __mul__(self, other):
        other = _as_gr(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational(a * c, 0)
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_gr(other)
        if other is NotImplemented:
            return other
        den = other.re * other.re + other.im * other.im
        if not den:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * other.conjugate()
        return GaussianRational(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return _as_gr(other) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, n: int):
        if n < 0:
            return GaussianRational(1) / (self ** -n)
        out = GaussianRational(1)
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _as_gr(other)
        if other is NotImplemented:
            return False
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return _fmt_rational(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"{_fmt_rational(self.re)}{sign}{_fmt_rational(abs(self.im))}i"


def _as_gr(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value)
    if isinstance(value, complex):
        return GaussianRational.coerce(value)
    return NotImplemented


def _fmt_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


_I = GaussianRational(0, 1)
_MINUS_I = GaussianRational(0, -1)

# (-i)^k and (i/2)^k tables used by reordering and symbol maps.
_POW_CACHE: Dict[Tuple[str, int], GaussianRational] = {}


def _unit_power(kind: str, k: int) -> GaussianRational:
    key = (kind, k)
    val = _POW_CACHE.get(key)
    if val is None:
        base = {
            "-i": _MINUS_I,
            "i/2": GaussianRational(0, Fraction(1, 2)),
            "-i/2": GaussianRational(0, Fraction(-1, 2)),
        }[kind]
        val = base ** k
        _POW_CACHE[key] = val
    return val


Key = Tuple[int, int, int]
LambdaCoefficient = Dict[int, GaussianRational]
"""Laurent polynomial in lam: lam-exponent -> coefficient, zeros never stored."""

Scalar = Union[int, Fraction, GaussianRational, complex]


def _accumulate(target: Dict[Key, GaussianRational], key: Key, value: GaussianRational):
    prev = target.get(key)
    if prev is None:
        if value:
            target[key] = value
    else:
        s = prev + value
        if s:
            target[key] = s
        else:
            del target[key]


class _TermMap:
    """Shared storage for sparse ``(a, b, lam_pow) -> coefficient`` maps."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Key, Scalar] | Iterable[Tuple[Key, Scalar]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: Dict[Key, GaussianRational] = {}
        for key, value in items:
            a, b, k = key
            if a < 0 or b < 0:
                raise ValueError(f"negative power in monomial {key}")
            _accumulate(clean, (int(a), int(b), int(k)), GaussianRational.coerce(value))
        self._terms = clean
        self._hash = None

    @classmethod
    def _from_clean(cls, terms: Dict[Key, GaussianRational]):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @property
    def terms(self) -> Dict[Key, GaussianRational]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if type(other) is not type(self):
            if isinstance(other, (int, Fraction, GaussianRational)):
                return self == type(self).scalar(other)
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    @classmethod
    def scalar(cls, value: Scalar, lam_pow: int = 0):
        return cls({(0, 0, lam_pow): value})

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for key, val in other._terms.items():
            _accumulate(out, key, val)
        return type(self)._from_clean(out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._from_clean({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor: Scalar, lam_pow: int = 0):
        """Multiply by ``factor * lam**lam_pow``."""
        factor = GaussianRational.coerce(factor)
        if not factor:
            return type(self)._from_clean({})
        return type(self)._from_clean(
            {(a, b, k + lam_pow): v * factor for (a, b, k), v in self._terms.items()}
        )

    def _coerce(self, other):
        if type(other) is type(self):
            return other
        if isinstance(other, (int, Fraction, GaussianRational, complex)):
            return type(self).scalar(other)
        return NotImplemented

    def coefficient(self, a: int, b: int) -> LambdaCoefficient:
        return {k: v for (x, p, k), v in self._terms.items() if x == a and p == b}

    def lambda_range(self) -> Tuple[int, int] | None:
        if not self._terms:
            return None
        ks = [k for (_, _, k) in self._terms]
        return min(ks), max(ks)

    def has_negative_lambda(self) -> bool:
        return any(k < 0 for (_, _, k) in self._terms)

    def max_x_power(self) -> int:
        return max((a for (a, _, _) in self._terms), default=0)

    def max_p_power(self) -> int:
        return max((b for (_, b, _) in self._terms), default=0)

    def total_degree(self) -> int:
        return max((a + b for (a, b, _) in self._terms), default=0)

    def conjugate_coefficients(self):
        return type(self)._from_clean({k: v.conjugate() for k, v in self._terms.items()})

    def reflect(self, x_sign: int = 1, p_sign: int = 1):
        """Apply x -> x_sign*x, p -> p_sign*p monomial-wise."""
        out = {}
        for (a, b, k), v in self._terms.items():
            s = (x_sign ** a) * (p_sign ** b)
            out[(a, b, k)] = v if s == 1 else -v
        return type(self)._from_clean(out)

    def substitute_lambda(self, value):
        """Evaluate the formal parameter at an exact rational value."""
        value = Fraction(value)
        out: Dict[Key, GaussianRational] = {}
        for (a, b, k), v in self._terms.items():
            if k < 0 and value == 0:
                raise ZeroDivisionError(
                    f"lam^{k} term at monomial ({a}, {b}) has no value at lam=0"
                )
            _accumulate(out, (a, b, 0), v * (value ** k))
        return type(self)._from_clean(out)

    def map_coefficients(self, fn):
        out: Dict[Key, GaussianRational] = {}
        for key, v in self._terms.items():
            nv = GaussianRational.coerce(fn(v))
            if nv:
                out[key] = nv
        return type(self)._from_clean(out)

    def sorted_terms(self):
        """Terms by total degree desc, x power desc, lam power asc."""
        return sorted(
            self._terms.items(),
            key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0], kv[0][2], kv[0][1]),
        )

    _X_NAME = "X"
    _P_NAME = "P"

    def to_text(self, show_lambda: bool = True) -> str:
        """Canonical one-line serialization.

        With ``show_lambda`` the power of lam is printed for every term, even
        when it is zero.  Without it, the operator must be lam-free.
        """
        if not self._terms:
            return "0"
        parts = []
        for (a, b, k), v in self.sorted_terms():
            if show_lambda:
                parts.append(f"({v})*l^{k}*{self._X_NAME}^{a}*{self._P_NAME}^{b}")
            else:
                if k != 0:
                    raise ValueError("operator carries lam; serialize with show_lambda=True")
                parts.append(f"({v})*{self._X_NAME}^{a}*{self._P_NAME}^{b}")
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"{type(self).__name__}({self.to_text()!r})"

    @classmethod
    def parse(cls, text: str):
        """Inverse of :meth:`to_text` (both with and without lam powers)."""
        text = text.strip()
        if text == "0":
            return cls({})
        term_re = re.compile(
            r"^\((?P<coef>[^()]+)\)(?:\*l\^(?P<lam>-?\d+))?"
            rf"\*{cls._X_NAME}\^(?P<a>\d+)\*{cls._P_NAME}\^(?P<b>\d+)$"
        )
        terms = []
        for chunk in text.split(" + "):
            m = term_re.match(chunk.strip())
            if m is None:
                raise ValueError(f"malformed term: {chunk!r}")
            coef = _parse_coef(m.group("coef"))
            lam = int(m.group("lam") or 0)
            terms.append(((int(m.group("a")), int(m.group("b")), lam), coef))
        return cls(terms)


_COEF_RE = re.compile(r"^(?P<re>-?\d+(?:/\d+)?)(?:(?P<sign>[+-])(?P<im>\d+(?:/\d+)?)i)?$")


def _parse_coef(text: str) -> GaussianRational:
    m = _COEF_RE.match(text)
    if m is None:
        raise ValueError(f"malformed coefficient: {text!r}")
    re_part = Fraction(m.group("re"))
    im_part = Fraction(m.group("im")) if m.group("im") else Fraction(0)
    if m.group("sign") == "-":
        im_part = -im_part
    return GaussianRational(re_part, im_part)


class WeylOperator(_TermMap):
    """Normal-ordered polynomial ``sum c * lam^k * X^a P^b``.

    Instances are immutable.  ``*`` is the noncommutative operator product,
    ``@`` is not used.  Scalars (int, Fraction, GaussianRational) mix freely.
    """

    __slots__ = ()

    @classmethod
    def monomial(cls, a: int, b: int, coef: Scalar = 1, lam_pow: int = 0) -> "WeylOperator":
        return cls({(a, b, lam_pow): coef})

    @classmethod
    def lam(cls, power: int = 1) -> "WeylOperator":
        return cls({(0, 0, power): 1})

    def __mul__(self, other):
        if isinstance(other, WeylOperator):
            return multiply(self, other)
        if isinstance(other, (int, Fraction, GaussianRational, complex)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, complex)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(GaussianRational(1) / GaussianRational.coerce(other))
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative operator power")
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def adjoint(self) -> "WeylOperator":
        return adjoint(self)

    def is_hermitian(self) -> bool:
        return adjoint(self) == self

    def is_anti_hermitian(self) -> bool:
        return adjoint(self) == -self

    def is_p_free(self) -> bool:
        return all(b == 0 for (_, b, _) in self._terms)


def reorder(p_pow: int, x_pow: int) -> WeylOperator:
    """Normal-ordered expansion of the word ``P^p_pow X^x_pow``."""
    if p_pow < 0 or x_pow < 0:
        raise ValueError("powers must be non-negative")
    return WeylOperator._from_clean(dict(_reorder_terms(p_pow, x_pow)))


def _reorder_terms(m: int, n: int):
    # P^m X^n = sum_k k! C(m,k) C(n,k) (-i lam)^k X^{n-k} P^{m-k}
    for k in range(min(m, n) + 1):
        c = factorial(k) * comb(m, k) * comb(n, k)
        yield (n - k, m - k, k), _unit_power("-i", k) * c


def multiply(A: WeylOperator, B: WeylOperator) -> WeylOperator:
    """Normal-ordered product ``A B``."""
    out: Dict[Key, GaussianRational] = {}
    for (a, b, k1), c1 in A._terms.items():
        for (c, d, k2), c2 in B._terms.items():
            c12 = c1 * c2
            if b == 0 or c == 0:
                _accumulate(out, (a + c, b + d, k1 + k2), c12)
                continue
            for (xs, ps, j), w in _reorder_cached(b, c):
                _accumulate(out, (a + xs, d + ps, k1 + k2 + j), c12 * w)
    return WeylOperator._from_clean(out)


@lru_cache(maxsize=None)
def _reorder_cached(m: int, n: int):
    return tuple(_reorder_terms(m, n))


def commutator(A: WeylOperator, B: WeylOperator) -> WeylOperator:
    return multiply(A, B) - multiply(B, A)


def anticommutator(A: WeylOperator, B: WeylOperator) -> WeylOperator:
    return multiply(A, B) + multiply(B, A)


def adjoint(A: WeylOperator) -> WeylOperator:
    """Hermitian adjoint; lam is real, so only i changes sign."""
    out: Dict[Key, GaussianRational] = {}
    for (a, b, k), v in A._terms.items():
        cv = v.conjugate()
        for (xs, ps, j), w in _reorder_cached(b, a):
            _accumulate(out, (xs, ps, k + j), cv * w)
    return WeylOperator._from_clean(out)


def pt_transform(A: WeylOperator) -> WeylOperator:
    """Combined parity and time reversal: ``c X^a P^b -> conj(c) (-1)^a X^a P^b``."""
    return A.conjugate_coefficients().reflect(x_sign=-1)


def is_pt_symmetric(A: WeylOperator) -> bool:
    return pt_transform(A) == A


class PhaseSpacePolynomial(_TermMap):
    """Polynomial in commuting phase-space variables x, p with lam-Laurent coefficients."""

    __slots__ = ()
    _X_NAME = "x"
    _P_NAME = "p"

    def __mul__(self, other):
        if isinstance(other, PhaseSpacePolynomial):
            out: Dict[Key, GaussianRational] = {}
            for (a, b, k), v in self._terms.items():
                for (c, d, j), w in other._terms.items():
                    _accumulate(out, (a + c, b + d, k + j), v * w)
            return PhaseSpacePolynomial._from_clean(out)
        if isinstance(other, (int, Fraction, GaussianRational, complex)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def classical_part(self) -> "PhaseSpacePolynomial":
        """The lam -> 0 limit; raises if a negative lam power is present."""
        if self.has_negative_lambda():
            raise ZeroDivisionError("negative lam power: lam -> 0 limit does not exist")
        return PhaseSpacePolynomial._from_clean(
            {key: v for key, v in self._terms.items() if key[2] == 0}
        )

    def is_real(self) -> bool:
        return all(v.is_real() for v in self._terms.values())

    def derivative(self, var: str) -> "PhaseSpacePolynomial":
        out: Dict[Key, GaussianRational] = {}
        for (a, b, k), v in self._terms.items():
            if var == "x" and a:
                _accumulate(out, (a - 1, b, k), v * a)
            elif var == "p" and b:
                _accumulate(out, (a, b - 1, k), v * b)
        return PhaseSpacePolynomial._from_clean(out)

    def evaluate(self, x: float, p: float, lam: float = 0.0) -> complex:
        total = 0j
        for (a, b, k), v in self._terms.items():
            if k and lam == 0:
                continue
            total += complex(v) * (x ** a) * (p ** b) * (lam ** k)
        return total


def weyl_symbol(A: WeylOperator) -> PhaseSpacePolynomial:
    """Weyl (symmetric-ordering) symbol of a normal-ordered operator.

    symbol(X^a P^b) = sum_k C(a,k) C(b,k) k! (i lam / 2)^k x^(a-k) p^(b-k)
    """
    return PhaseSpacePolynomial._from_clean(_symbol_map(A._terms, "i/2"))


def weyl_quantize(S: PhaseSpacePolynomial) -> WeylOperator:
    """Operator whose Weyl symbol is ``S`` (inverse of :func:`weyl_symbol`)."""
    return WeylOperator._from_clean(_symbol_map(S._terms, "-i/2"))


def _symbol_map(terms, kind):
    out: Dict[Key, GaussianRational] = {}
    for (a, b, k), v in terms.items():
        for j in range(min(a, b) + 1):
            w = _unit_power(kind, j) * (comb(a, j) * comb(b, j) * factorial(j))
            _accumulate(out, (a - j, b - j, k + j), v * w)
    return out


def substitute_lambda(A: WeylOperator, value) -> WeylOperator:
    return A.substitute_lambda(value)


ONE = WeylOperator.scalar(1)
ZERO = WeylOperator({})
X = WeylOperator.monomial(1, 0)
P = WeylOperator.monomial(0, 1)
