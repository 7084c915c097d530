"""Graded symbols of the filtered operator algebra.

A degree-``k`` symbol is a class ``T + P^{k-1}``.  In a chart it is
determined by two homogeneous pieces in the cotangent variables ``xi``:

* ``scalar``: ``{beta: u_beta}`` with ``|beta| = k`` (the usual principal
  symbol when it is nonzero), and
* ``sl``: ``{alpha: A_alpha}`` with ``|alpha| = k - 1`` and every
  ``A_alpha`` trace-free.

Product and bracket are defined through operator representatives
(``sigma_{i+j}(T o D)`` and ``sigma_{i+j-1}([T, D])``); :func:`symbol_mul`
and :func:`symbol_bracket` implement closed forms that agree with those
definitions (``mul_via_representatives`` / ``bracket_via_representatives``
keep the representative route available as an oracle).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .diffop import DiffOp, OperatorError, d_order, p_order
from .matalg import MatPoly, mat_comm, traceless_project
from .poly import Poly

__all__ = [
    "GlSymbol",
    "SymbolElem",
    "SymbolError",
    "bracket_via_representatives",
    "delta",
    "gl_bracket",
    "gl_embed",
    "gl_mul",
    "lift",
    "mul_via_representatives",
    "sigma_i",
    "sigma_ppal",
    "sigma_pson",
    "symbol_bracket",
    "symbol_mul",
    "theta",
]


class SymbolError(ValueError):
    pass


def _grlex(alpha) -> tuple:
    return (sum(alpha), tuple(alpha))


class SymbolElem:
    """Immutable element of ``S^k``; see the module docstring for the layout."""

    __slots__ = ("m", "n", "degree", "scalar", "sl", "_hash")

    def __init__(
        self,
        m: int,
        n: int,
        degree: int,
        scalar: Mapping[tuple, Poly] | None = None,
        sl: Mapping[tuple, MatPoly] | None = None,
    ):
        if degree < 0:
            raise SymbolError("symbol degree must be non-negative")
        self.m, self.n, self.degree = m, n, degree
        sc = {}
        for beta, u in (scalar or {}).items():
            beta = tuple(beta)
            if len(beta) != m or sum(beta) != degree:
                raise SymbolError(f"scalar xi-index {beta} is not of degree {degree}")
            if u.m != m:
                raise SymbolError("scalar coefficient has the wrong number of variables")
            if u:
                sc[beta] = u
        mats = {}
        for alpha, a in (sl or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != m or sum(alpha) != degree - 1:
                raise SymbolError(f"sl xi-index {alpha} is not of degree {degree - 1}")
            if a.n != n or a.m != m:
                raise SymbolError("sl coefficient shape mismatch")
            if a.trace():
                raise SymbolError("sl coefficients must be trace-free")
            if not a.is_zero():
                mats[alpha] = a
        self.scalar = dict(sorted(sc.items(), key=lambda kv: _grlex(kv[0])))
        self.sl = dict(sorted(mats.items(), key=lambda kv: _grlex(kv[0])))
        self._hash = None

    @classmethod
    def zero(cls, m: int, n: int, degree: int) -> "SymbolElem":
        return cls(m, n, degree)

    def is_zero(self) -> bool:
        return not self.scalar and not self.sl

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _check(self, other: "SymbolElem") -> None:
        if not isinstance(other, SymbolElem):
            raise TypeError(f"expected SymbolElem, got {type(other).__name__}")
        if (self.m, self.n) != (other.m, other.n):
            raise SymbolError(
                f"dimension mismatch: (m={self.m}, n={self.n}) vs (m={other.m}, n={other.n})"
            )

    def __add__(self, other: "SymbolElem") -> "SymbolElem":
        self._check(other)
        if self.degree != other.degree:
            raise SymbolError("cannot add symbols of different degrees")
        return SymbolElem(
            self.m, self.n, self.degree, _merge(self.scalar, other.scalar), _merge(self.sl, other.sl)
        )

    def __neg__(self) -> "SymbolElem":
        return SymbolElem(
            self.m,
            self.n,
            self.degree,
            {b: -u for b, u in self.scalar.items()},
            {a: -c for a, c in self.sl.items()},
        )

    def __sub__(self, other: "SymbolElem") -> "SymbolElem":
        return self + (-other)

    def scale(self, c) -> "SymbolElem":
        return SymbolElem(
            self.m,
            self.n,
            self.degree,
            {b: u * c for b, u in self.scalar.items()},
            {a: x.scale(c) for a, x in self.sl.items()},
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolElem):
            return NotImplemented
        return (
            (self.m, self.n, self.degree) == (other.m, other.n, other.degree)
            and self.scalar == other.scalar
            and self.sl == other.sl
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(
                (self.m, self.n, self.degree, tuple(self.scalar.items()), tuple(self.sl.items()))
            )
        return self._hash

    def __repr__(self) -> str:
        sc = ", ".join(f"xi{list(b)}: {str(u)!r}" for b, u in self.scalar.items())
        sl = ", ".join(f"xi{list(a)}: {c!r}" for a, c in self.sl.items())
        return f"SymbolElem(deg={self.degree}, scalar={{{sc}}}, sl={{{sl}}})"


def _merge(a: Mapping, b: Mapping) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] + v if k in out else v
    return out


# symbol maps ----------------------------------------------------------


def sigma_ppal(t: DiffOp) -> dict[tuple, MatPoly]:
    """Usual principal symbol: top-order coefficients keyed by ``xi`` multi-index."""
    return dict(t.top_terms(d_order(t)))


def sigma_pson(t: DiffOp) -> SymbolElem:
    """Class of ``t`` in ``S^{p_order(t)}``."""
    d = d_order(t)
    k = p_order(t)
    scalar: dict[tuple, Poly] = {}
    if k == d:
        for beta, c in t.top_terms(d).items():
            u = c.scalar_witness()
            if u is None:
                raise SymbolError("non-scalar coefficient at the filtration order")
            scalar[beta] = u
    sl = {}
    if k >= 1:
        sl = {alpha: traceless_project(c) for alpha, c in t.top_terms(k - 1).items()}
    return SymbolElem(t.m, t.n, k, scalar, sl)


def sigma_i(t: DiffOp, i: int) -> SymbolElem:
    """Class of ``t`` in ``S^i``; zero when ``t`` already lies in ``P^{i-1}``.

    The zero operator maps to the zero symbol of degree ``i``.
    """
    if i < 0:
        raise SymbolError("symbol degree must be non-negative")
    if t.is_zero():
        return SymbolElem.zero(t.m, t.n, i)
    k = p_order(t)
    if i < k:
        raise SymbolError(f"operator has filtration order {k}; no class in S^{i}")
    if i > k:
        return SymbolElem.zero(t.m, t.n, i)
    return sigma_pson(t)


def lift(p: SymbolElem, m: int | None = None, n: int | None = None) -> DiffOp:
    """Chart representative: ``xi^beta -> u_beta d^beta``, ``xi^alpha -> A_alpha d^alpha``."""
    m = p.m if m is None else m
    n = p.n if n is None else n
    if (m, n) != (p.m, p.n):
        raise SymbolError("lift dimensions disagree with the symbol")
    terms: dict[tuple, MatPoly] = {b: MatPoly.scalar(u, n) for b, u in p.scalar.items()}
    for alpha, a in p.sl.items():
        terms[alpha] = a
    return DiffOp(m, n, terms)


# product and bracket ----------------------------------------------------


def _xi_mul(f: Mapping, g: Mapping, mult: Callable) -> dict:
    out: dict = {}
    for a, x in f.items():
        for b, y in g.items():
            prod = mult(x, y)
            if not prod:
                continue
            key = tuple(i + j for i, j in zip(a, b))
            out[key] = out[key] + prod if key in out else prod
    return out


def _xi_diff(f: Mapping, axis: int) -> dict:
    """``d/d xi_axis`` of a xi-polynomial."""
    out = {}
    for a, x in f.items():
        if a[axis]:
            key = a[:axis] + (a[axis] - 1,) + a[axis + 1 :]
            out[key] = x.scale(a[axis]) if isinstance(x, MatPoly) else x * a[axis]
    return out


def _x_diff(f: Mapping, axis: int) -> dict:
    return {a: x.diff(axis) for a, x in f.items()}


def _poisson(f: Mapping, g: Mapping, m: int, mult: Callable) -> dict:
    """Canonical cotangent bracket ``sum_i (d_xi_i f d_x_i g - d_x_i f d_xi_i g)``."""
    out: dict = {}
    for i in range(m):
        for part in (
            _xi_mul(_xi_diff(f, i), _x_diff(g, i), mult),
            {k: -v for k, v in _xi_mul(_x_diff(f, i), _xi_diff(g, i), mult).items()},
        ):
            out = _merge(out, part)
    return out


def _sp(u, v):
    return u * v


def _sm(u: Poly, a: MatPoly) -> MatPoly:
    return a.scale(u)


def _ms(a: MatPoly, u: Poly) -> MatPoly:
    return a.scale(u)


def symbol_mul(p: SymbolElem, q: SymbolElem) -> SymbolElem:
    """Graded product ``S^i x S^j -> S^{i+j}``."""
    p._check(q)
    scalar = _xi_mul(p.scalar, q.scalar, _sp)
    sl = _merge(_xi_mul(p.scalar, q.sl, _sm), _xi_mul(p.sl, q.scalar, _ms))
    return SymbolElem(p.m, p.n, p.degree + q.degree, scalar, sl)


def symbol_bracket(p: SymbolElem, q: SymbolElem) -> SymbolElem:
    """Poisson bracket ``S^i x S^j -> S^{i+j-1}``.

    Two degree-0 symbols bracket to the zero symbol of degree 0.
    """
    p._check(q)
    deg = p.degree + q.degree - 1
    if deg < 0:
        return SymbolElem.zero(p.m, p.n, 0)
    m = p.m
    scalar = _poisson(p.scalar, q.scalar, m, _sp)
    sl = _xi_mul(p.sl, q.sl, mat_comm)
    sl = _merge(sl, _poisson(p.scalar, q.sl, m, _sm))
    sl = _merge(sl, _poisson(p.sl, q.scalar, m, _ms))
    return SymbolElem(p.m, p.n, deg, scalar, sl)


def mul_via_representatives(p: SymbolElem, q: SymbolElem) -> SymbolElem:
    """``sigma_{i+j}(lift(p) o lift(q))``."""
    p._check(q)
    return sigma_i(lift(p) @ lift(q), p.degree + q.degree)


def bracket_via_representatives(p: SymbolElem, q: SymbolElem) -> SymbolElem:
    """``sigma_{i+j-1}([lift(p), lift(q)])``."""
    from .diffop import commutator

    p._check(q)
    deg = p.degree + q.degree - 1
    c = commutator(lift(p), lift(q))
    if deg < 0:
        if not c.is_zero():
            raise SymbolError("degree-0 representatives failed to commute")
        return SymbolElem.zero(p.m, p.n, 0)
    return sigma_i(c, deg)


# exact sequence -------------------------------------------------------


def theta(p: SymbolElem) -> SymbolElem:
    """Embed a trace-free matrix symbol (no scalar part) into ``S^k``."""
    if p.scalar:
        raise SymbolError("theta takes symbols with an empty scalar part")
    return p


def delta(p: SymbolElem) -> dict[tuple, Poly]:
    """Scalar principal part, as a homogeneous xi-polynomial of degree ``p.degree``."""
    return dict(p.scalar)


def delta_of_operator(t: DiffOp, k: int) -> dict[tuple, Poly]:
    """``delta`` evaluated on ``t + P^{k-1}`` straight from operators.

    Zero when ``t`` has differential order below ``k``, otherwise the
    principal symbol (scalar there because ``t`` is in ``P^k``).
    """
    if t.is_zero() or d_order(t) < k:
        return {}
    out = {}
    for beta, c in sigma_ppal(t).items():
        u = c.scalar_witness()
        if u is None:
            raise OperatorError("operator is not in P^k")
        out[beta] = u
    return out


# gl(E) case -----------------------------------------------------------


@dataclass(frozen=True)
class GlSymbol:
    """``sigma_pson`` image of an endomorphism field: ``A + u id`` with ``A`` trace-free."""

    sl: MatPoly
    scalar: Poly

    def __post_init__(self):
        if self.sl.trace():
            raise SymbolError("GlSymbol.sl must be trace-free")
        if self.scalar.m != self.sl.m:
            raise SymbolError("GlSymbol parts disagree on the number of variables")

    @classmethod
    def of(cls, a: MatPoly) -> "GlSymbol":
        """Symbol of a field viewed in degrees 0 and 1: ``A' + (tr A / n) id``."""
        return cls(traceless_project(a), a.trace() / a.n)


def _gl_check(a: GlSymbol, b: GlSymbol) -> None:
    if (a.sl.n, a.sl.m) != (b.sl.n, b.sl.m):
        raise SymbolError("GlSymbol shape mismatch")


def gl_mul(a: GlSymbol, b: GlSymbol) -> GlSymbol:
    _gl_check(a, b)
    return GlSymbol(b.sl.scale(a.scalar) + a.sl.scale(b.scalar), a.scalar * b.scalar)


def gl_bracket(a: GlSymbol, b: GlSymbol) -> GlSymbol:
    _gl_check(a, b)
    return GlSymbol(mat_comm(a.sl, b.sl), Poly.zero(a.sl.m))


def gl_embed(a: GlSymbol) -> tuple[SymbolElem, SymbolElem]:
    """``(degree-0 symbol of u, degree-1 symbol of A)``."""
    m, n = a.sl.m, a.sl.n
    return (
        SymbolElem(m, n, 0, {(0,) * m: a.scalar}),
        SymbolElem(m, n, 1, {}, {(0,) * m: a.sl}),
    )
