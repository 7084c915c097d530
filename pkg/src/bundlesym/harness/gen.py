"""Seeded random instances for the verification suites."""
from __future__ import annotations

import hashlib
import random
from dataclasses import asdict, dataclass
from fractions import Fraction

from ..connection import Connection, SplitPair, VectField
from ..diffop import DiffOp, Section
from ..matalg import MatPoly, traceless_project
from ..poly import Poly, multi_indices
from ..symbols import GlSymbol, SymbolElem

MASK64 = (1 << 64) - 1


class GenError(ValueError):
    pass


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    trials: int = 100
    m: int = 2
    n: int = 2
    max_order: int = 3
    max_deg: int = 2
    max_coef: int = 5

    def __post_init__(self):
        if not 0 <= self.seed <= MASK64:
            raise GenError("seed must be a 64-bit unsigned integer")
        if self.n < 2:
            raise GenError("fiber rank n must exceed 1")
        for name in ("trials", "m", "max_deg", "max_coef"):
            if getattr(self, name) < 1:
                raise GenError(f"{name} must be at least 1")
        if self.max_order < 0:
            raise GenError("max_order must be non-negative")

    def to_json(self) -> dict:
        return asdict(self)


def trial_seed(seed: int, index: int) -> int:
    """``seed XOR H(index)``: independent of execution order."""
    h = hashlib.blake2b(index.to_bytes(8, "little"), digest_size=8).digest()
    return seed ^ int.from_bytes(h, "little")


class Gen:
    """Random algebraic objects drawn from one ``random.Random`` stream."""

    def __init__(self, cfg: GenConfig, seed: int):
        self.cfg = cfg
        self.rng = random.Random(seed)
        self.m, self.n = cfg.m, cfg.n

    # scalars ----------------------------------------------------------

    def rational(self, nonzero: bool = False) -> Fraction:
        c = self.cfg.max_coef
        while True:
            q = Fraction(self.rng.randint(-c, c), self.rng.randint(1, c))
            if q or not nonzero:
                return q

    def poly(self, max_deg: int | None = None, max_terms: int = 3, nonzero: bool = False) -> Poly:
        max_deg = self.cfg.max_deg if max_deg is None else max_deg
        m = self.m
        while True:
            terms = {}
            for _ in range(self.rng.randint(1, max_terms)):
                d = self.rng.randint(0, max_deg)
                exps = self._exponents(d)
                terms[exps] = self.rational(nonzero=True)
            p = Poly(m, terms)
            if p or not nonzero:
                return p

    def _exponents(self, d: int) -> tuple[int, ...]:
        exps = [0] * self.m
        for _ in range(d):
            exps[self.rng.randrange(self.m)] += 1
        return tuple(exps)

    def point(self) -> tuple[Fraction, ...]:
        return tuple(self.rational() for _ in range(self.m))

    # matrices ---------------------------------------------------------

    def matrix(self, density: float = 0.5, constant: bool = False, nonzero: bool = True) -> MatPoly:
        n, m = self.n, self.m
        while True:
            rows = []
            for _ in range(n):
                row = []
                for _ in range(n):
                    if self.rng.random() < density:
                        row.append(Poly.const(m, self.rational()) if constant else self.poly())
                    else:
                        row.append(Poly.zero(m))
                rows.append(row)
            a = MatPoly(rows)
            if not nonzero or not a.is_zero():
                return a

    def nonscalar_matrix(self, constant: bool = False) -> MatPoly:
        while True:
            a = self.matrix(constant=constant)
            if a.scalar_witness() is None:
                return a

    def traceless(self, constant: bool = False) -> MatPoly:
        while True:
            a = traceless_project(self.matrix(constant=constant))
            if not a.is_zero():
                return a

    def skew(self, density: float = 0.6) -> MatPoly:
        n, m = self.n, self.m
        rows = [[Poly.zero(m)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if self.rng.random() < density:
                    p = self.poly()
                    rows[i][j], rows[j][i] = p, -p
        return MatPoly(rows)

    def strictly_upper(self, constant: bool) -> MatPoly:
        n, m = self.n, self.m
        rows = [[Poly.zero(m)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if self.rng.random() < 0.7:
                    rows[i][j] = Poly.const(m, self.rational()) if constant else self.poly()
        return MatPoly(rows)

    def constant_nilpotent(self) -> MatPoly:
        """A strictly upper-triangular matrix conjugated by random elementary matrices."""
        n, m = self.n, self.m
        a = self.strictly_upper(constant=True)
        for _ in range(self.rng.randint(0, 3)):
            i, j = self.rng.sample(range(n), 2)
            c = Poly.const(m, self.rational(nonzero=True))
            e = MatPoly.identity(n, m) + MatPoly.unit(n, m, i, j, c)
            e_inv = MatPoly.identity(n, m) - MatPoly.unit(n, m, i, j, c)
            a = e @ a @ e_inv
        return a

    # operators --------------------------------------------------------

    def diffop(self, constraint="any", max_order: int | None = None, density: float = 0.4) -> DiffOp:
        """Random operator.

        ``constraint`` is ``"any"``, ``("in_Pk", k)`` (order below ``k`` free,
        order ``k`` scalar) or ``"scalar-principal"`` (top order scalar).
        """
        max_order = self.cfg.max_order if max_order is None else max_order
        if constraint == "any":
            top, scalar_top = self.rng.randint(0, max_order), False
        elif constraint == "scalar-principal":
            top, scalar_top = self.rng.randint(0, max_order), True
        elif isinstance(constraint, tuple) and constraint[0] == "in_Pk":
            top, scalar_top = constraint[1], True
            if top < 0:
                raise GenError("in_Pk constraint needs k >= 0")
        else:
            raise GenError(f"unknown constraint {constraint!r}")
        m, n = self.m, self.n
        terms = {}
        for order in range(top + 1):
            for alpha in multi_indices(m, order):
                if self.rng.random() >= density:
                    continue
                if order == top and scalar_top:
                    terms[alpha] = MatPoly.scalar(self.poly(nonzero=True), n)
                else:
                    terms[alpha] = self.matrix()
        if not any(sum(a) == top for a in terms):
            alpha = self.rng.choice(list(multi_indices(m, top)))
            if scalar_top:
                terms[alpha] = MatPoly.scalar(self.poly(nonzero=True), n)
            else:
                terms[alpha] = self.matrix()
        return DiffOp(m, n, terms)

    def section(self) -> Section:
        return Section([self.poly() for _ in range(self.n)])

    # symbols ----------------------------------------------------------

    def symbol(self, degree: int, density: float = 0.5, scalar: bool = True) -> SymbolElem:
        m, n = self.m, self.n
        sc, sl = {}, {}
        if scalar:
            for beta in multi_indices(m, degree):
                if self.rng.random() < density:
                    sc[beta] = self.poly(nonzero=True)
        if degree >= 1:
            for alpha in multi_indices(m, degree - 1):
                if self.rng.random() < density:
                    sl[alpha] = self.traceless()
        return SymbolElem(m, n, degree, sc, sl)

    def nonzero_symbol(self, degree: int, scalar: bool = True) -> SymbolElem:
        if degree == 0 and not scalar:
            raise GenError("a nonzero degree-0 symbol needs a scalar part")
        while True:
            s = self.symbol(degree, scalar=scalar)
            if not s.is_zero():
                return s

    def gl_symbol(self) -> GlSymbol:
        return GlSymbol(traceless_project(self.matrix(nonzero=False)), self.poly())

    # geometry ---------------------------------------------------------

    def vectfield(self, nonzero: bool = False, density: float = 0.6) -> VectField:
        m = self.m
        while True:
            comps = tuple(self.poly() if self.rng.random() < density else Poly.zero(m) for _ in range(m))
            X = VectField(comps)
            if not nonzero or not X.is_zero():
                return X

    def connection(self, metric: bool = True) -> Connection:
        if metric:
            return Connection([self.skew() for _ in range(self.m)])
        while True:
            c = Connection([self.matrix(nonzero=False) for _ in range(self.m)])
            if not c.metric:
                return c

    def pair(self, trace_free: bool = True, nonzero_field: bool = False) -> SplitPair:
        X = self.vectfield(nonzero=nonzero_field)
        if trace_free:
            A = traceless_project(self.matrix(nonzero=False))
        else:
            A = self.matrix(nonzero=False)
        return SplitPair(X, A)
