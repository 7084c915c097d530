"""Exact sparse multivariate polynomials over the rationals.

Polynomials in ``x1..xm`` stand in for smooth functions on a trivializing
chart.  Coefficients are exposed as :class:`fractions.Fraction`; internally a
polynomial keeps integer numerators over one common denominator so that the
hot loops (see :mod:`bundlesym.kernels`) only touch Python integers.

Text grammar::

    3/2 x1^2 x2 - x3 + 1
    -x1*x2 + 1/3

Rendering always uses descending graded-lex order.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from math import gcd
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

from . import kernels

__all__ = [
    "Poly",
    "PolyError",
    "parse_poly",
    "multi_indices",
    "monomials_up_to",
    "pderiv",
    "poly_add",
    "poly_eval",
    "poly_mul",
]

_WIDTH = kernels.WIDTH
_MASK = kernels.MASK
MAX_EXPONENT = _MASK


class PolyError(ValueError):
    """Invalid polynomial input or incompatible operands."""


def _pack(exps: Sequence[int], m: int) -> int:
    key = 0
    for e in exps:
        if e < 0 or e > MAX_EXPONENT:
            raise PolyError(f"exponent {e} out of range")
        key = (key << _WIDTH) | e
    return key


def _unpack(key: int, m: int) -> tuple[int, ...]:
    out = [0] * m
    for i in range(m - 1, -1, -1):
        out[i] = key & _MASK
        key >>= _WIDTH
    return tuple(out)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"expected a rational coefficient, got {type(c).__name__}")


class Poly:
    """Immutable polynomial in ``m`` variables with rational coefficients."""

    __slots__ = ("m", "_terms", "_den", "_hash", "_deg")

    def __init__(self, m: int, terms: Mapping[Sequence[int], object] | None = None):
        if m < 1:
            raise PolyError("a polynomial needs at least one variable")
        self.m = m
        self._hash = None
        self._deg = None
        if not terms:
            self._terms, self._den = {}, 1
            return
        fracs = {}
        for exps, c in terms.items():
            if len(exps) != m:
                raise PolyError(f"exponent vector {tuple(exps)} does not have length {m}")
            c = _as_fraction(c)
            if c:
                k = _pack(exps, m)
                fracs[k] = fracs.get(k, 0) + c
        den = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for c in fracs.values()), 1)
        nums = {k: c.numerator * (den // c.denominator) for k, c in fracs.items() if c}
        self._terms, self._den = kernels.for_vars(m).normalize(nums, den)

    @classmethod
    def _raw(cls, m: int, terms: dict, den: int) -> "Poly":
        p = cls.__new__(cls)
        p.m = m
        p._terms = terms
        p._den = den if terms else 1
        p._hash = None
        p._deg = None
        return p

    # constructors -----------------------------------------------------

    @classmethod
    def zero(cls, m: int) -> "Poly":
        return cls._raw(m, {}, 1)

    @classmethod
    def const(cls, m: int, c) -> "Poly":
        c = _as_fraction(c)
        if not c:
            return cls._raw(m, {}, 1)
        return cls._raw(m, {0: c.numerator}, c.denominator)

    @classmethod
    def one(cls, m: int) -> "Poly":
        return cls._raw(m, {0: 1}, 1)

    @classmethod
    def var(cls, m: int, i: int) -> "Poly":
        """The coordinate ``x_i`` (1-based)."""
        if not 1 <= i <= m:
            raise PolyError(f"variable index {i} out of range 1..{m}")
        return cls._raw(m, {1 << (_WIDTH * (m - i)): 1}, 1)

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    # inspection -------------------------------------------------------

    def terms(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        """Yield ``(exponents, coefficient)`` in descending graded-lex order."""
        m, den = self.m, self._den
        keyed = sorted(
            ((_unpack(k, m), v) for k, v in self._terms.items()),
            key=lambda t: (sum(t[0]), t[0]),
            reverse=True,
        )
        for exps, v in keyed:
            yield exps, Fraction(v, den)

    def as_dict(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self.terms())

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        v = self._terms.get(_pack(exps, self.m), 0)
        return Fraction(v, self._den)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def constant_value(self) -> Fraction:
        return Fraction(self._terms.get(0, 0), self._den)

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        if self._deg is None:
            if not self._terms:
                self._deg = -1
            else:
                self._deg = max(sum(_unpack(k, self.m)) for k in self._terms)
        return self._deg

    # arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.m != self.m:
                raise PolyError(f"variable-count mismatch: {self.m} vs {other.m}")
            return other
        if isinstance(other, (int, Rational)):
            return Poly.const(self.m, other)
        return NotImplemented

    def __add__(self, other):
        q = self._coerce(other)
        if q is NotImplemented:
            return q
        if not q._terms:
            return self
        if not self._terms:
            return q
        k = kernels.for_vars(self.m)
        da, db = self._den, q._den
        g = gcd(da, db)
        den = da // g * db
        terms = k.add_scaled(self._terms, den // da, q._terms, den // db)
        return Poly._raw(self.m, *k.normalize(terms, den))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.m, {k: -v for k, v in self._terms.items()}, self._den)

    def __sub__(self, other):
        q = self._coerce(other)
        if q is NotImplemented:
            return q
        return self + (-q)

    def __rsub__(self, other):
        q = self._coerce(other)
        if q is NotImplemented:
            return q
        return q + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, Poly):
            return self.scale(other)
        q = self._coerce(other)
        if q is NotImplemented:
            return q
        if not self._terms or not q._terms:
            return Poly._raw(self.m, {}, 1)
        if self.degree + q.degree > MAX_EXPONENT:
            raise OverflowError("product degree exceeds the packed exponent range")
        k = kernels.for_vars(self.m)
        terms = k.mul(self._terms, q._terms)
        return Poly._raw(self.m, *k.normalize(terms, self._den * q._den))

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = _as_fraction(c)
        if not c or not self._terms:
            return Poly._raw(self.m, {}, 1)
        k = kernels.for_vars(self.m)
        terms = k.scale(self._terms, c.numerator)
        return Poly._raw(self.m, *k.normalize(terms, self._den * c.denominator))

    def __truediv__(self, c):
        c = _as_fraction(c)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self.scale(1 / c)

    def __pow__(self, e: int) -> "Poly":
        if not isinstance(e, int) or e < 0:
            raise PolyError("only non-negative integer powers are supported")
        result, base = Poly.one(self.m), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def diff(self, axis: int) -> "Poly":
        """Partial derivative along the 0-based ``axis``."""
        if not 0 <= axis < self.m:
            raise PolyError(f"axis {axis} out of range for {self.m} variables")
        if not self._terms:
            return self
        k = kernels.for_vars(self.m)
        terms = k.deriv(self._terms, _WIDTH * (self.m - 1 - axis))
        return Poly._raw(self.m, *k.normalize(terms, self._den))

    def diff_multi(self, alpha: Sequence[int]) -> "Poly":
        p = self
        for axis, times in enumerate(alpha):
            for _ in range(times):
                if not p._terms:
                    return p
                p = p.diff(axis)
        return p

    def __call__(self, point: Sequence) -> Fraction:
        return poly_eval(self, point)

    # comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.m == other.m and self._den == other._den and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.m, self._den, frozenset(self._terms.items())))
        return self._hash

    # text -------------------------------------------------------------

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Poly({self.m}, {self.render()!r})"

    def render(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for exps, c in self.terms():
            mono = " ".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(exps) if e
            )
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{mag} {mono}"
            else:
                body = str(mag)
            sign = "-" if c < 0 else "+"
            if not pieces:
                pieces.append(body if sign == "+" else f"-{body}")
            else:
                pieces.append(f"{sign} {body}")
        return " ".join(pieces)

    @classmethod
    def parse(cls, text: str, m: int) -> "Poly":
        return parse_poly(text, m)


_TOKEN = re.compile(
    r"\s*(?:(?P<op>[+-])|(?P<num>\d+(?:/\d+)?)|x(?P<var>\d+)(?:\^(?P<exp>\d+))?|(?P<star>\*))"
)


def parse_poly(text: str, m: int) -> Poly:
    """Parse the polynomial text grammar into a :class:`Poly` in ``m`` variables."""
    if not isinstance(text, str):
        raise PolyError(f"polynomial must be a string, got {type(text).__name__}")
    pos, end = 0, len(text.rstrip())
    terms: dict[tuple[int, ...], Fraction] = {}
    sign, coeff, exps = 1, None, [0] * m
    have_term = sign_seen = expect_factor = False

    def flush():
        nonlocal sign, coeff, exps, have_term, sign_seen
        key = tuple(exps)
        c = sign * (coeff if coeff is not None else Fraction(1))
        terms[key] = terms.get(key, Fraction(0)) + c
        sign, coeff, exps = 1, None, [0] * m
        have_term = sign_seen = False

    while pos < end:
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise PolyError(f"cannot parse {text!r} at position {pos}")
        pos = mt.end()
        if mt.group("op"):
            if expect_factor:
                raise PolyError(f"dangling '*' in {text!r}")
            if have_term:
                flush()
            elif sign_seen:
                raise PolyError(f"repeated sign in {text!r}")
            sign = -1 if mt.group("op") == "-" else 1
            sign_seen = True
        elif mt.group("num"):
            if coeff is not None or have_term:
                raise PolyError(f"misplaced coefficient in {text!r}")
            num, _, den = mt.group("num").partition("/")
            if den and int(den) == 0:
                raise PolyError(f"zero denominator in {text!r}")
            coeff = Fraction(int(num), int(den) if den else 1)
            have_term, expect_factor = True, False
        elif mt.group("var"):
            i = int(mt.group("var"))
            if not 1 <= i <= m:
                raise PolyError(f"variable x{i} out of range for {m} variables")
            e = int(mt.group("exp")) if mt.group("exp") is not None else 1
            if e < 1:
                raise PolyError(f"exponent must be at least 1 in {text!r}")
            exps[i - 1] += e
            have_term, expect_factor = True, False
        else:
            if not have_term:
                raise PolyError(f"misplaced '*' in {text!r}")
            expect_factor = True
    if expect_factor or not have_term:
        raise PolyError(f"incomplete polynomial {text!r}")
    flush()
    return Poly(m, terms)


def _check_same(p: Poly, q: Poly) -> None:
    if p.m != q.m:
        raise PolyError(f"variable-count mismatch: {p.m} vs {q.m}")


def poly_add(p: Poly, q: Poly) -> Poly:
    _check_same(p, q)
    return p + q


def poly_mul(p: Poly, q: Poly) -> Poly:
    _check_same(p, q)
    return p * q


def pderiv(p: Poly, i: int) -> Poly:
    """Partial derivative with respect to ``x_i`` (1-based, as in the text grammar)."""
    if not 1 <= i <= p.m:
        raise PolyError(f"variable index {i} out of range 1..{p.m}")
    return p.diff(i - 1)


def poly_eval(p: Poly, point: Sequence) -> Fraction:
    """Evaluate ``p`` exactly at a rational point."""
    if len(point) != p.m:
        raise PolyError(f"point has length {len(point)}, expected {p.m}")
    pt = [_as_fraction(v) for v in point]
    total = Fraction(0)
    for exps, c in p.terms():
        val = c
        for v, e in zip(pt, exps):
            if e:
                val *= v**e
        total += val
    return total


def monomials_up_to(m: int, max_deg: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree at most ``max_deg``, ascending graded-lex."""
    out: list[tuple[int, ...]] = []
    for d in range(max_deg + 1):
        out.extend(sorted(multi_indices(m, d)))
    return out


def multi_indices(m: int, d: int) -> Iterable[tuple[int, ...]]:
    """Exponent vectors of length ``m`` with total degree exactly ``d``."""
    if m == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in multi_indices(m - 1, d - first):
            yield (first, *rest)
