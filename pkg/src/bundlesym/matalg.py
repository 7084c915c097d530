"""Endomorphism fields: ``n x n`` matrices over :class:`~bundlesym.poly.Poly`.

Covers gl(E), the trace-free part sl(E), and a fixed nilpotent basis of
sl(n) used to split trace-free fields into nilpotent summands.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence

from .poly import Poly, PolyError

__all__ = [
    "MatPoly",
    "MatrixError",
    "decompose_nilpotent",
    "is_nilpotent",
    "is_scalar",
    "mat_comm",
    "nilpotent_basis",
    "traceless_project",
]


class MatrixError(ValueError):
    pass


class MatPoly:
    """Immutable square matrix with polynomial entries.

    Entries share one variable count ``m``; the fiber rank ``n`` must exceed 1.
    """

    __slots__ = ("n", "m", "rows", "_hash")

    def __init__(self, rows: Sequence[Sequence[Poly]]):
        n = len(rows)
        if n < 2:
            raise MatrixError(f"fiber rank must exceed 1, got {n}")
        if any(len(r) != n for r in rows):
            raise MatrixError("matrix must be square")
        m = rows[0][0].m
        for r in rows:
            for p in r:
                if not isinstance(p, Poly):
                    raise MatrixError(f"matrix entries must be Poly, got {type(p).__name__}")
                if p.m != m:
                    raise MatrixError("matrix entries disagree on the number of variables")
        self.n = n
        self.m = m
        self.rows = tuple(tuple(r) for r in rows)
        self._hash = None

    # constructors -----------------------------------------------------

    @classmethod
    def zero(cls, n: int, m: int) -> "MatPoly":
        z = Poly.zero(m)
        return cls([[z] * n for _ in range(n)])

    @classmethod
    def identity(cls, n: int, m: int) -> "MatPoly":
        return cls.scalar(Poly.one(m), n)

    @classmethod
    def scalar(cls, u: Poly, n: int) -> "MatPoly":
        z = Poly.zero(u.m)
        return cls([[u if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, n: int, m: int, i: int, j: int, u: Poly | None = None) -> "MatPoly":
        """``u`` times the elementary matrix with a one at 0-based ``(i, j)``."""
        z = Poly.zero(m)
        u = Poly.one(m) if u is None else u
        return cls([[u if (a, b) == (i, j) else z for b in range(n)] for a in range(n)])

    @classmethod
    def diag(cls, entries: Sequence[Poly]) -> "MatPoly":
        n = len(entries)
        z = Poly.zero(entries[0].m)
        return cls([[entries[i] if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def constant(cls, values: Sequence[Sequence], m: int) -> "MatPoly":
        return cls([[Poly.const(m, v) for v in r] for r in values])

    # inspection -------------------------------------------------------

    def __getitem__(self, ij: tuple[int, int]) -> Poly:
        i, j = ij
        return self.rows[i][j]

    def entries(self) -> Iterable[Poly]:
        for r in self.rows:
            yield from r

    def is_zero(self) -> bool:
        return not any(self.entries())

    def __bool__(self) -> bool:
        return not self.is_zero()

    def trace(self) -> Poly:
        t = self.rows[0][0]
        for i in range(1, self.n):
            t = t + self.rows[i][i]
        return t

    def scalar_witness(self) -> Poly | None:
        """``u`` when the matrix equals ``u * id``, else ``None``."""
        n, rows = self.n, self.rows
        u = rows[0][0]
        for i in range(n):
            for j in range(n):
                if i == j:
                    if rows[i][i] != u:
                        return None
                elif rows[i][j]:
                    return None
        return u

    def is_constant(self) -> bool:
        return all(p.is_constant() for p in self.entries())

    def max_degree(self) -> int:
        return max(p.degree for p in self.entries())

    # arithmetic -------------------------------------------------------

    def _check(self, other: "MatPoly") -> None:
        if not isinstance(other, MatPoly):
            raise TypeError(f"expected MatPoly, got {type(other).__name__}")
        if other.n != self.n or other.m != self.m:
            raise MatrixError(
                f"shape mismatch: n={self.n}, m={self.m} vs n={other.n}, m={other.m}"
            )

    def __add__(self, other: "MatPoly") -> "MatPoly":
        self._check(other)
        return MatPoly([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other: "MatPoly") -> "MatPoly":
        self._check(other)
        return MatPoly([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self) -> "MatPoly":
        return MatPoly([[-a for a in r] for r in self.rows])

    def scale(self, c) -> "MatPoly":
        """Multiply every entry by a Poly or a rational."""
        if isinstance(c, Poly) and c.m != self.m:
            raise PolyError(f"variable-count mismatch: {self.m} vs {c.m}")
        if not c:
            return MatPoly.zero(self.n, self.m)
        return MatPoly([[a * c for a in r] for r in self.rows])

    def __mul__(self, c):
        if isinstance(c, MatPoly):
            return NotImplemented
        if isinstance(c, (Poly, int, Rational)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other: "MatPoly") -> "MatPoly":
        self._check(other)
        u = self.scalar_witness()
        if u is not None:
            return other.scale(u)
        v = other.scalar_witness()
        if v is not None:
            return self.scale(v)
        n = self.n
        cols = list(zip(*other.rows))
        zero = Poly.zero(self.m)
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = zero
                for a, b in zip(r, c):
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatPoly(out)

    def __pow__(self, e: int) -> "MatPoly":
        if e < 0:
            raise MatrixError("negative matrix power")
        result = MatPoly.identity(self.n, self.m)
        for _ in range(e):
            result = result @ self
        return result

    def transpose(self) -> "MatPoly":
        return MatPoly([list(c) for c in zip(*self.rows)])

    def diff(self, axis: int) -> "MatPoly":
        return MatPoly([[a.diff(axis) for a in r] for r in self.rows])

    def diff_multi(self, alpha: Sequence[int]) -> "MatPoly":
        return MatPoly([[a.diff_multi(alpha) for a in r] for r in self.rows])

    def traceless(self) -> "MatPoly":
        return traceless_project(self)

    def apply(self, vec: Sequence[Poly]) -> tuple[Poly, ...]:
        zero = Poly.zero(self.m)
        out = []
        for r in self.rows:
            acc = zero
            for a, s in zip(r, vec):
                if a and s:
                    acc = acc + a * s
            out.append(acc)
        return tuple(out)

    # comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatPoly):
            return NotImplemented
        return self.n == other.n and self.m == other.m and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(repr(str(p)) for p in r) + "]" for r in self.rows)
        return f"MatPoly([{body}])"

    def to_strings(self) -> list[list[str]]:
        return [[p.render() for p in r] for r in self.rows]

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]], m: int) -> "MatPoly":
        if not isinstance(rows, (list, tuple)) or not rows:
            raise MatrixError("matrix must be a non-empty array of rows")
        for r in rows:
            if not isinstance(r, (list, tuple)):
                raise MatrixError("matrix rows must be arrays")
        return cls([[Poly.parse(s, m) for s in r] for r in rows])


def mat_comm(a: MatPoly, b: MatPoly) -> MatPoly:
    """Matrix commutator ``a b - b a``."""
    a._check(b)
    if a.scalar_witness() is not None or b.scalar_witness() is not None:
        return MatPoly.zero(a.n, a.m)
    return (a @ b) - (b @ a)


def traceless_project(a: MatPoly) -> MatPoly:
    """``a - tr(a)/n * id``."""
    t = a.trace()
    if not t:
        return a
    return a - MatPoly.scalar(t / a.n, a.n)


def is_scalar(a: MatPoly) -> tuple[bool, Poly | None]:
    u = a.scalar_witness()
    return (u is not None, u)


def is_nilpotent(a: MatPoly) -> bool:
    """True iff ``a**n`` vanishes identically."""
    return (a ** a.n).is_zero()


def _basis_values(n: int) -> list[list[list[Fraction]]]:
    """Constant nilpotent basis of sl(n) as nested Fraction lists.

    Elementary ``E_ij`` for ``i != j`` except the sub-diagonal ``E_{i+1,i}``,
    plus for each adjacent pair the two rank-one nilpotents
    ``[[1, 1], [-1, -1]]`` and ``[[1, -1], [1, -1]]`` placed on the
    ``(i, i+1)`` block.  Every member squares to zero.
    """
    out = []
    for i in range(n):
        for j in range(n):
            if i != j and i != j + 1:
                mat = [[Fraction(0)] * n for _ in range(n)]
                mat[i][j] = Fraction(1)
                out.append(mat)
    for i in range(n - 1):
        for s in (1, -1):
            mat = [[Fraction(0)] * n for _ in range(n)]
            mat[i][i], mat[i][i + 1] = Fraction(1), Fraction(s)
            mat[i + 1][i], mat[i + 1][i + 1] = Fraction(-s), Fraction(-1)
            out.append(mat)
    return out


def _coords(n: int) -> list[tuple[int, int]]:
    """Coordinates on sl(n): every off-diagonal slot and the first n-1 diagonal slots."""
    return [(i, j) for i in range(n) for j in range(n) if i != j] + [(i, i) for i in range(n - 1)]


def _invert(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    size = len(rows)
    aug = [r[:] + [Fraction(int(i == j)) for j in range(size)] for i, r in enumerate(rows)]
    for col in range(size):
        piv = next((r for r in range(col, size) if aug[r][col]), None)
        if piv is None:
            raise MatrixError("nilpotent basis is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [r[size:] for r in aug]


@lru_cache(maxsize=None)
def _solver(n: int) -> tuple:
    basis = _basis_values(n)
    coords = _coords(n)
    # column k holds basis element k in sl(n) coordinates
    system = [[b[i][j] for b in basis] for (i, j) in coords]
    inverse = _invert(system)
    return tuple(tuple(r) for r in inverse), tuple(coords)


def nilpotent_basis(n: int, m: int = 1) -> list[MatPoly]:
    """``n**2 - 1`` constant nilpotent matrices spanning sl(n)."""
    if n <= 1:
        raise MatrixError("nilpotent basis needs n > 1")
    return [MatPoly.constant(b, m) for b in _basis_values(n)]


def decompose_nilpotent(a: MatPoly) -> list[tuple[Poly, MatPoly]]:
    """Write a trace-free field as ``sum u_i N_i`` over the nilpotent basis.

    Pairs with a zero coefficient are omitted.
    """
    if a.trace():
        raise MatrixError("decompose_nilpotent needs a trace-free matrix")
    inverse, coords = _solver(a.n)
    vec = [a[i, j] for (i, j) in coords]
    basis = nilpotent_basis(a.n, a.m)
    zero = Poly.zero(a.m)
    out = []
    for row, mat in zip(inverse, basis):
        acc = zero
        for c, v in zip(row, vec):
            if c and v:
                acc = acc + v.scale(c)
        if acc:
            out.append((acc, mat))
    return out
