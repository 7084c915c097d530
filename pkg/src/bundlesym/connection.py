"""Connections on the trivial bundle and the order-1 splitting.

A connection is given by Christoffel matrices ``Gamma_1..Gamma_m`` so that
``nabla_X = sum_i X^i (d_i + Gamma_i)``.  It is *metric* (comes from an
O(n)-reduction with the chart frame declared orthonormal) when every
``Gamma_i`` is skew-symmetric.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .diffop import DiffOp, commutator, d_order, is_in_Pk
from .matalg import MatPoly, mat_comm
from .poly import Poly
from .symbols import SymbolElem, SymbolError, sigma_pson, symbol_bracket

__all__ = [
    "Connection",
    "SplittingError",
    "NilWitness",
    "SplitPair",
    "VectField",
    "ad_nilpotency_check",
    "bracket_star",
    "covariant_endo",
    "curvature",
    "curvature_components",
    "lambda_decompose",
    "mu",
    "mu_inverse",
    "nabla",
    "nil_falsification",
    "section_map",
    "section_of_symbol",
    "trace_decompose",
]


class SplittingError(ValueError):
    pass


@dataclass(frozen=True)
class VectField:
    components: tuple[Poly, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise SplittingError("a vector field needs at least one component")
        if any(c.m != len(comps) for c in comps):
            raise SplittingError("vector field components must be polynomials in m variables")

    @property
    def m(self) -> int:
        return len(self.components)

    @classmethod
    def zero(cls, m: int) -> "VectField":
        return cls((Poly.zero(m),) * m)

    @classmethod
    def coordinate(cls, m: int, i: int, u: Poly | None = None) -> "VectField":
        """``u * d_i`` with 1-based ``i``."""
        u = Poly.one(m) if u is None else u
        return cls(tuple(u if j == i - 1 else Poly.zero(m) for j in range(m)))

    def is_zero(self) -> bool:
        return not any(self.components)

    def apply(self, u: Poly) -> Poly:
        """Directional derivative ``X(u)``."""
        acc = Poly.zero(self.m)
        for i, x in enumerate(self.components):
            if x:
                acc = acc + x * u.diff(i)
        return acc

    def apply_matrix(self, a: MatPoly) -> MatPoly:
        acc = MatPoly.zero(a.n, a.m)
        for i, x in enumerate(self.components):
            if x:
                acc = acc + a.diff(i).scale(x)
        return acc

    def bracket(self, other: "VectField") -> "VectField":
        """``[X, Y]^j = X(Y^j) - Y(X^j)``."""
        return VectField(
            tuple(self.apply(y) - other.apply(x) for x, y in zip(self.components, other.components))
        )

    def __add__(self, other: "VectField") -> "VectField":
        return VectField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "VectField":
        return VectField(tuple(-a for a in self.components))


@dataclass(frozen=True)
class SplitPair:
    """``(X, A)`` standing for ``nabla_X + A``."""

    X: VectField
    A: MatPoly

    def __post_init__(self):
        if self.X.m != self.A.m:
            raise SplittingError("SplitPair parts disagree on the number of variables")


class Connection:
    __slots__ = ("m", "n", "gamma", "metric")

    def __init__(self, gamma: Sequence[MatPoly]):
        gamma = tuple(gamma)
        if not gamma:
            raise SplittingError("a connection needs one Christoffel matrix per coordinate")
        m, n = len(gamma), gamma[0].n
        for g in gamma:
            if g.n != n or g.m != m:
                raise SplittingError("Christoffel matrices must be n x n over m variables")
        self.m, self.n, self.gamma = m, n, gamma
        self.metric = all((g + g.transpose()).is_zero() for g in gamma)

    @classmethod
    def flat(cls, m: int, n: int) -> "Connection":
        return cls([MatPoly.zero(n, m)] * m)

    def __add__(self, other: "Connection") -> "Connection":
        return Connection([a + b for a, b in zip(self.gamma, other.gamma)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Connection):
            return NotImplemented
        return self.gamma == other.gamma

    def __hash__(self) -> int:
        return hash(self.gamma)

    def __repr__(self) -> str:
        return f"Connection(m={self.m}, n={self.n}, metric={self.metric})"

    def contract(self, X: VectField) -> MatPoly:
        """``sum_i X^i Gamma_i``."""
        acc = MatPoly.zero(self.n, self.m)
        for x, g in zip(X.components, self.gamma):
            if x:
                acc = acc + g.scale(x)
        return acc


def _check(c: Connection, X: VectField) -> None:
    if X.m != c.m:
        raise SplittingError(f"vector field has {X.m} components, connection expects {c.m}")


def nabla(c: Connection, X: VectField) -> DiffOp:
    _check(c, X)
    m, n = c.m, c.n
    terms = {}
    for i, x in enumerate(X.components):
        if x:
            terms[tuple(int(j == i) for j in range(m))] = MatPoly.scalar(x, n)
    terms[(0,) * m] = c.contract(X)
    return DiffOp(m, n, terms)


def covariant_endo(c: Connection, X: VectField, b: MatPoly) -> MatPoly:
    """Induced connection on endomorphisms: ``sum_i X^i (d_i B + [Gamma_i, B])``."""
    _check(c, X)
    acc = X.apply_matrix(b)
    for x, g in zip(X.components, c.gamma):
        if x:
            acc = acc + mat_comm(g, b).scale(x)
    return acc


def lambda_decompose(t: DiffOp, c: Connection) -> SplitPair:
    """Split ``t in P^1`` as ``nabla_X + A``."""
    if (t.m, t.n) != (c.m, c.n):
        raise SplittingError("operator and connection shapes differ")
    if not is_in_Pk(t, 1):
        raise SplittingError("lambda_decompose needs an operator in P^1")
    m = t.m
    comps = []
    for i in range(m):
        coeff = t.coefficient(tuple(int(j == i) for j in range(m)))
        u = coeff.scalar_witness()
        comps.append(u)
    X = VectField(tuple(comps))
    A = t.coefficient((0,) * m) - c.contract(X)
    return SplitPair(X, A)


def curvature(c: Connection, X: VectField, Y: VectField) -> MatPoly:
    """``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`` as an endomorphism field."""
    diff = commutator(nabla(c, X), nabla(c, Y)) - nabla(c, X.bracket(Y))
    if diff.is_zero():
        return MatPoly.zero(c.n, c.m)
    if d_order(diff) != 0:
        raise SplittingError("curvature operator has positive order; internal inconsistency")
    return diff.coefficient((0,) * c.m)


def curvature_components(c: Connection, X: VectField, Y: VectField) -> MatPoly:
    """Closed form ``sum_ij X^i Y^j (d_i G_j - d_j G_i + [G_i, G_j])``."""
    _check(c, X)
    _check(c, Y)
    acc = MatPoly.zero(c.n, c.m)
    g = c.gamma
    for i, x in enumerate(X.components):
        if not x:
            continue
        for j, y in enumerate(Y.components):
            if not y or i == j:
                continue
            r_ij = g[j].diff(i) - g[i].diff(j) + mat_comm(g[i], g[j])
            if r_ij:
                acc = acc + r_ij.scale(x * y)
    return acc


def bracket_star(p: SplitPair, q: SplitPair, c: Connection) -> SplitPair:
    """``([X,Y], R(X,Y) + nabla_X B - nabla_Y A + [A,B])``."""
    if (p.A.n, p.A.m) != (q.A.n, q.A.m) or p.A.n != c.n:
        raise SplittingError("SplitPair shapes disagree with the connection")
    X, Y = p.X, q.X
    mat = (
        curvature_components(c, X, Y)
        + covariant_endo(c, X, q.A)
        - covariant_endo(c, Y, p.A)
        + mat_comm(p.A, q.A)
    )
    return SplitPair(X.bracket(Y), mat)


def mu(p: SplitPair, c: Connection) -> SymbolElem:
    """``sigma_pson(nabla_X + A)``, as a degree-1 symbol."""
    return _degree_one(nabla(c, p.X) + _mult(p.A), c)


def mu_inverse(s: SymbolElem, c: Connection) -> SplitPair:
    """Inverse of :func:`mu` on degree-1 symbols, for metric ``c``."""
    if not c.metric:
        raise SplittingError("mu_inverse needs a metric connection")
    if s.degree != 1 or (s.m, s.n) != (c.m, c.n):
        raise SymbolError("mu_inverse takes a degree-1 symbol matching the connection")
    m = c.m
    comps = []
    for i in range(m):
        comps.append(s.scalar.get(tuple(int(j == i) for j in range(m)), Poly.zero(m)))
    X = VectField(tuple(comps))
    A = s.sl.get((0,) * m, MatPoly.zero(c.n, m)) - c.contract(X)
    return SplitPair(X, A)


def _mult(a: MatPoly) -> DiffOp:
    return DiffOp.multiplication(a)


def _degree_one(t: DiffOp, c: Connection) -> SymbolElem:
    if t.is_zero():
        return SymbolElem.zero(c.m, c.n, 1)
    s = sigma_pson(t)
    if s.degree == 0:
        return SymbolElem.zero(c.m, c.n, 1)
    return s


def section_map(p: SplitPair, c: Connection) -> DiffOp:
    """``nabla_X + A`` for trace-free ``A`` and metric ``c``."""
    if not c.metric:
        raise SplittingError("section_map needs a metric connection")
    if p.A.trace():
        raise SplittingError("section_map needs a trace-free endomorphism part")
    return nabla(c, p.X) + _mult(p.A)


def section_of_symbol(s: SymbolElem, c: Connection) -> DiffOp:
    """The splitting ``S^1 -> P^1``: ``section_map(mu_inverse(s))``."""
    return section_map(mu_inverse(s, c), c)


def trace_decompose(t: DiffOp, c: Connection) -> tuple[DiffOp, Poly]:
    """``t = (nabla_X + A - tr(A)/n id) + tr(A)/n id``; returns both pieces' data."""
    if not c.metric:
        raise SplittingError("trace_decompose needs a metric connection")
    pair = lambda_decompose(t, c)
    u = pair.A.trace() / c.n
    adjusted = nabla(c, pair.X) + _mult(pair.A - MatPoly.scalar(u, c.n))
    return adjusted, u


def ad_nilpotency_check(
    a: MatPoly, targets: Sequence[SplitPair], c: Connection, r_max: int | None = None
) -> int | None:
    """Smallest ``r <= r_max`` with ``(ad sigma(a))^r`` killing every target.

    Targets are mapped to degree-1 symbols through ``c``; returns ``None``
    when the budget runs out.
    """
    from .matalg import is_nilpotent

    if not is_nilpotent(a):
        raise SplittingError("ad_nilpotency_check needs a nilpotent endomorphism field")
    if r_max is None:
        r_max = 2 * a.n - 1 if a.is_constant() else 8
    sa = SymbolElem(a.m, a.n, 1, {}, {(0,) * a.m: a})
    current = [mu(t, c) for t in targets]
    for r in range(1, r_max + 1):
        current = [symbol_bracket(sa, z) for z in current]
        if all(z.is_zero() for z in current):
            return r
    return None


@dataclass(frozen=True)
class NilWitness:
    """Outcome of :func:`nil_falsification`."""

    u: Poly
    iterates: tuple[SymbolElem, ...]
    confirmed: bool


def _falsification_candidates(X: VectField, r_max: int):
    m = X.m
    for i, x in enumerate(X.components):
        if not x:
            continue
        for e in range(r_max, r_max + 3):
            yield Poly.monomial(tuple(e if j == i else 0 for j in range(m)))
    for e in range(r_max, r_max + 3):
        yield Poly.monomial((e,) * m)


def nil_falsification(t: SplitPair, r_max: int = 6) -> NilWitness:
    """Show ``nabla_X + A`` (``X != 0``) is not ad-nilpotent within ``r_max`` steps.

    Uses ``B = u E_12`` for a coordinate monomial ``u`` with ``X(u) != 0``;
    the chart (flat) symbol of ``t`` is iterated with the symbol bracket.
    ``confirmed`` is False when no tried ``u`` keeps every iterate nonzero.
    """
    X, A = t.X, t.A
    if X.is_zero():
        raise SplittingError("nil_falsification needs a nonzero vector field part")
    m, n = A.m, A.n
    flat = Connection.flat(m, n)
    st = mu(t, flat)
    last = None
    for u in _falsification_candidates(X, r_max):
        if not X.apply(u):
            continue
        z = SymbolElem(m, n, 1, {}, {(0,) * m: MatPoly.unit(n, m, 0, 1, u)})
        iterates = []
        for _ in range(r_max):
            z = symbol_bracket(st, z)
            if z.is_zero():
                break
            iterates.append(z)
        if len(iterates) == r_max:
            return NilWitness(u, tuple(iterates), True)
        last = NilWitness(u, tuple(iterates), False)
    if last is None:
        raise SplittingError("no coordinate monomial is moved by X")
    return last
