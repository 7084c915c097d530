"""Matrix-coefficient linear differential operators on a trivializing chart.

An operator is ``sum_alpha T_alpha d^alpha`` acting on sections (n-vectors
of polynomials).  Besides the usual differential order this module computes
the order in the filtration ``P^0 subset P^1 subset ...`` where ``P^0`` holds
the scalar multiplication operators and ``P^{k+1}`` is everything whose
commutator with every multiplication operator lands in ``P^k``.  On a chart
that filtration is read off the coefficients: ``T in P^k`` exactly when
nothing has order above ``k`` and every order-``k`` coefficient is scalar.
"""
from __future__ import annotations

from math import comb
from typing import Iterable, Mapping, Sequence

from .matalg import MatPoly, MatrixError
from .poly import Poly, monomials_up_to

__all__ = [
    "DiffOp",
    "OperatorError",
    "Section",
    "apply",
    "commutator",
    "compose",
    "d_order",
    "gamma",
    "is_in_Pk",
    "p_order",
    "p_order_oracle",
]

MultiIndex = tuple


class OperatorError(ValueError):
    pass


def _grlex(alpha: Sequence[int]) -> tuple:
    return (sum(alpha), tuple(alpha))


class Section:
    """A section of the trivial rank-``n`` bundle: ``n`` polynomials."""

    __slots__ = ("m", "n", "components")

    def __init__(self, components: Sequence[Poly]):
        comps = tuple(components)
        if len(comps) < 2:
            raise OperatorError("a section needs at least two components")
        m = comps[0].m
        if any(p.m != m for p in comps):
            raise OperatorError("section components disagree on the number of variables")
        self.m, self.n, self.components = m, len(comps), comps

    def __eq__(self, other) -> bool:
        if not isinstance(other, Section):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __add__(self, other: "Section") -> "Section":
        return Section([a + b for a, b in zip(self.components, other.components)])

    def scale(self, u) -> "Section":
        return Section([a * u for a in self.components])

    def diff_multi(self, alpha: Sequence[int]) -> "Section":
        return Section([a.diff_multi(alpha) for a in self.components])

    def __repr__(self) -> str:
        return "Section(" + ", ".join(repr(str(p)) for p in self.components) + ")"


class DiffOp:
    """Immutable finite sum of ``MatPoly`` coefficients times ``d^alpha``.

    ``terms`` maps derivative multi-indices (tuples of length ``m``) to
    coefficients; zero coefficients are dropped on construction.
    """

    __slots__ = ("m", "n", "terms", "_hash")

    def __init__(self, m: int, n: int, terms: Mapping[MultiIndex, MatPoly] | None = None):
        self.m, self.n = m, n
        clean = {}
        for alpha, coeff in (terms or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != m or any(a < 0 for a in alpha):
                raise OperatorError(f"bad multi-index {alpha} for m={m}")
            if not isinstance(coeff, MatPoly):
                raise OperatorError(f"coefficient must be MatPoly, got {type(coeff).__name__}")
            if coeff.n != n or coeff.m != m:
                raise OperatorError(
                    f"coefficient shape (n={coeff.n}, m={coeff.m}) does not match (n={n}, m={m})"
                )
            if not coeff.is_zero():
                clean[alpha] = coeff
        self.terms = dict(sorted(clean.items(), key=lambda kv: _grlex(kv[0])))
        self._hash = None

    # constructors -----------------------------------------------------

    @classmethod
    def zero(cls, m: int, n: int) -> "DiffOp":
        return cls(m, n)

    @classmethod
    def identity(cls, m: int, n: int) -> "DiffOp":
        return cls(m, n, {(0,) * m: MatPoly.identity(n, m)})

    @classmethod
    def multiplication(cls, a: MatPoly) -> "DiffOp":
        """The order-0 operator ``s -> a s``."""
        return cls(a.m, a.n, {(0,) * a.m: a})

    @classmethod
    def partial(cls, alpha: Sequence[int], n: int, coeff: MatPoly | None = None) -> "DiffOp":
        m = len(alpha)
        coeff = MatPoly.identity(n, m) if coeff is None else coeff
        return cls(m, n, {tuple(alpha): coeff})

    # inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, alpha: Sequence[int]) -> MatPoly:
        c = self.terms.get(tuple(alpha))
        return MatPoly.zero(self.n, self.m) if c is None else c

    def max_coeff_degree(self) -> int:
        return max((c.max_degree() for c in self.terms.values()), default=-1)

    def top_terms(self, order: int) -> dict[MultiIndex, MatPoly]:
        return {a: c for a, c in self.terms.items() if sum(a) == order}

    # arithmetic -------------------------------------------------------

    def _check(self, other: "DiffOp") -> None:
        if not isinstance(other, DiffOp):
            raise TypeError(f"expected DiffOp, got {type(other).__name__}")
        if (self.m, self.n) != (other.m, other.n):
            raise OperatorError(
                f"shape mismatch: (m={self.m}, n={self.n}) vs (m={other.m}, n={other.n})"
            )

    def __add__(self, other: "DiffOp") -> "DiffOp":
        self._check(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out[a] + c if a in out else c
        return DiffOp(self.m, self.n, out)

    def __neg__(self) -> "DiffOp":
        return DiffOp(self.m, self.n, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scale(self, c) -> "DiffOp":
        return DiffOp(self.m, self.n, {a: t.scale(c) for a, t in self.terms.items()})

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return compose(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return (self.m, self.n) == (other.m, other.n) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.m, self.n, tuple(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self.terms:
            return f"DiffOp(m={self.m}, n={self.n}, 0)"
        body = " + ".join(f"{c!r}*d{list(a)}" for a, c in self.terms.items())
        return f"DiffOp(m={self.m}, n={self.n}, {body})"


def gamma(u: Poly, n: int) -> DiffOp:
    """Multiplication by the scalar function ``u``."""
    if n < 2:
        raise OperatorError(f"fiber rank must exceed 1, got {n}")
    return DiffOp.multiplication(MatPoly.scalar(u, n))


def apply(t: DiffOp, s: Section) -> Section:
    if (t.m, t.n) != (s.m, s.n):
        raise OperatorError(f"shape mismatch: operator (m={t.m}, n={t.n}) vs section (m={s.m}, n={s.n})")
    acc = [Poly.zero(t.m)] * t.n
    for alpha, coeff in t.terms.items():
        ds = s.diff_multi(alpha).components
        acc = [a + b for a, b in zip(acc, coeff.apply(ds))]
    return Section(acc)


def _sub_indices(alpha: Sequence[int]) -> Iterable[tuple[MultiIndex, int]]:
    """``(gamma, binom(alpha, gamma))`` over all ``gamma <= alpha`` componentwise."""
    idx: list[tuple[MultiIndex, int]] = [((), 1)]
    for a in alpha:
        idx = [(g + (c,), w * comb(a, c)) for g, w in idx for c in range(a + 1)]
    return idx


def compose(t: DiffOp, d: DiffOp) -> DiffOp:
    """Operator product ``t o d`` via the multi-index Leibniz rule.

    ``d^alpha (C d^beta) = sum_{gamma <= alpha} binom(alpha, gamma)
    (d^{alpha-gamma} C) d^{gamma+beta}``.
    """
    t._check(d)
    m, n = t.m, t.n
    out: dict[MultiIndex, MatPoly] = {}
    deriv_cache: dict[tuple[MultiIndex, MultiIndex], MatPoly] = {}
    for alpha, tc in t.terms.items():
        subs = _sub_indices(alpha)
        for beta, dc in d.terms.items():
            for g, weight in subs:
                delta = tuple(a - c for a, c in zip(alpha, g))
                key = (beta, delta)
                dd = deriv_cache.get(key)
                if dd is None:
                    dd = dc.diff_multi(delta) if any(delta) else dc
                    deriv_cache[key] = dd
                if dd.is_zero():
                    continue
                prod = tc @ dd
                if weight != 1:
                    prod = prod.scale(weight)
                target = tuple(a + b for a, b in zip(g, beta))
                out[target] = out[target] + prod if target in out else prod
    return DiffOp(m, n, out)


def commutator(t: DiffOp, d: DiffOp) -> DiffOp:
    return compose(t, d) - compose(d, t)


def d_order(t: DiffOp) -> int:
    """Usual differential order (largest ``|alpha|`` present)."""
    if t.is_zero():
        raise OperatorError("the zero operator has no order")
    return max(sum(a) for a in t.terms)


def p_order(t: DiffOp) -> int:
    """Smallest ``k`` with ``t`` in ``P^k``."""
    d = d_order(t)
    if all(c.scalar_witness() is not None for c in t.top_terms(d).values()):
        return d
    return d + 1


def is_in_Pk(t: DiffOp, k: int) -> bool:
    if k < 0:
        raise OperatorError("filtration index must be non-negative")
    for alpha, c in t.terms.items():
        order = sum(alpha)
        if order > k:
            return False
        if order == k and c.scalar_witness() is None:
            return False
    return True


def p_order_oracle(t: DiffOp, k: int) -> bool:
    """Membership in ``P^k`` straight from the recursive definition.

    ``P^0`` is the scalar multiplication operators; ``t`` lies in ``P^k``
    when ``[t, gamma(u)]`` lies in ``P^{k-1}`` for every monomial ``u`` of
    degree at most ``d_order(t) + 1``.  Independent of :func:`is_in_Pk`;
    meant as a test oracle.
    """
    if k < 0:
        raise OperatorError("filtration index must be non-negative")
    if t.is_zero():
        return True
    if k == 0:
        if len(t.terms) != 1:
            return False
        ((alpha, c),) = t.terms.items()
        return not any(alpha) and c.scalar_witness() is not None
    for exps in monomials_up_to(t.m, d_order(t) + 1):
        u = gamma(Poly.monomial(exps), t.n)
        if not p_order_oracle(commutator(t, u), k - 1):
            return False
    return True
