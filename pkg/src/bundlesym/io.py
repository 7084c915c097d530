"""JSON file formats for operators, symbols, connections and friends.

Every ``*_to_json`` output is canonical (fixed key order, graded-lex term
order), so ``dumps(to_json(from_json(doc)))`` reproduces ``dumps(doc)`` byte
for byte once ``doc`` itself came from this module.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .connection import Connection, SplitPair, VectField
from .diffop import DiffOp, Section
from .matalg import MatPoly
from .poly import Poly
from .symbols import SymbolElem

__all__ = [
    "FormatError",
    "dumps",
    "load",
]


class FormatError(ValueError):
    """Malformed input document."""


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: top-level value must be an object")
    return doc


def _int(doc: dict, key: str, minimum: int = 1) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise FormatError(f"field {key!r} must be an integer >= {minimum}")
    return v


def _index(v, m: int, what: str) -> tuple[int, ...]:
    if (
        not isinstance(v, list)
        or len(v) != m
        or not all(isinstance(a, int) and not isinstance(a, bool) and a >= 0 for a in v)
    ):
        raise FormatError(f"{what} must be a list of {m} non-negative integers")
    return tuple(v)


def _grlex(alpha) -> tuple:
    return (sum(alpha), tuple(alpha))


def _wrap(fn, *args):
    try:
        return fn(*args)
    except FormatError:
        raise
    except (ValueError, TypeError) as exc:
        raise FormatError(str(exc)) from exc


# fragments ------------------------------------------------------------


def matrix_to_json(a: MatPoly) -> list[list[str]]:
    return a.to_strings()


def matrix_from_json(rows, m: int, n: int | None = None) -> MatPoly:
    a = _wrap(MatPoly.from_strings, rows, m)
    if n is not None and a.n != n:
        raise FormatError(f"matrix is {a.n}x{a.n}, expected {n}x{n}")
    return a


def _polys(comps, m: int, what: str) -> list[Poly]:
    if not isinstance(comps, list):
        raise FormatError(f"{what} must be a list of polynomial strings")
    return [_wrap(Poly.parse, s, m) for s in comps]


# operators ------------------------------------------------------------


def op_to_json(t: DiffOp) -> dict:
    return {
        "m": t.m,
        "n": t.n,
        "terms": [
            {"alpha": list(a), "coeff": matrix_to_json(c)}
            for a, c in sorted(t.terms.items(), key=lambda kv: _grlex(kv[0]))
        ],
    }


def op_from_json(doc: dict) -> DiffOp:
    m, n = _int(doc, "m"), _int(doc, "n", 2)
    terms = doc.get("terms")
    if not isinstance(terms, list):
        raise FormatError("field 'terms' must be a list")
    out: dict[tuple, MatPoly] = {}
    for t in terms:
        if not isinstance(t, dict):
            raise FormatError("each term must be an object")
        alpha = _index(t.get("alpha"), m, "alpha")
        c = matrix_from_json(t.get("coeff"), m, n)
        out[alpha] = out[alpha] + c if alpha in out else c
    return _wrap(DiffOp, m, n, out)


def section_to_json(s: Section) -> dict:
    return {"m": s.m, "n": s.n, "components": [p.render() for p in s.components]}


def section_from_json(doc: dict) -> Section:
    m, n = _int(doc, "m"), _int(doc, "n", 2)
    comps = _polys(doc.get("components"), m, "components")
    if len(comps) != n:
        raise FormatError(f"section has {len(comps)} components, expected {n}")
    return _wrap(Section, comps)


# symbols --------------------------------------------------------------


def symbol_to_json(p: SymbolElem) -> dict:
    return {
        "m": p.m,
        "n": p.n,
        "degree": p.degree,
        "scalar": [{"xi": list(b), "poly": u.render()} for b, u in p.scalar.items()],
        "sl": [{"xi": list(a), "coeff": matrix_to_json(c)} for a, c in p.sl.items()],
    }


def symbol_from_json(doc: dict) -> SymbolElem:
    m, n = _int(doc, "m"), _int(doc, "n", 2)
    degree = _int(doc, "degree", 0)
    scalar, sl = {}, {}
    for key, target in (("scalar", scalar), ("sl", sl)):
        items = doc.get(key, [])
        if not isinstance(items, list):
            raise FormatError(f"field {key!r} must be a list")
        for it in items:
            if not isinstance(it, dict):
                raise FormatError(f"entries of {key!r} must be objects")
            xi = _index(it.get("xi"), m, "xi")
            if key == "scalar":
                v = _wrap(Poly.parse, it.get("poly"), m)
            else:
                v = matrix_from_json(it.get("coeff"), m, n)
            target[xi] = target[xi] + v if xi in target else v
    return _wrap(SymbolElem, m, n, degree, scalar, sl)


def principal_to_json(m: int, n: int, ppal: dict) -> dict:
    return {
        "m": m,
        "n": n,
        "terms": [
            {"xi": list(b), "coeff": matrix_to_json(c)}
            for b, c in sorted(ppal.items(), key=lambda kv: _grlex(kv[0]))
        ],
    }


# connections ----------------------------------------------------------


def connection_to_json(c: Connection) -> dict:
    return {"m": c.m, "n": c.n, "gamma": [matrix_to_json(g) for g in c.gamma]}


def connection_from_json(doc: dict) -> Connection:
    m, n = _int(doc, "m"), _int(doc, "n", 2)
    gamma = doc.get("gamma")
    if not isinstance(gamma, list) or len(gamma) != m:
        raise FormatError(f"field 'gamma' must be a list of {m} matrices")
    return _wrap(Connection, [matrix_from_json(g, m, n) for g in gamma])


def vectfield_to_json(X: VectField) -> dict:
    return {"m": X.m, "components": [p.render() for p in X.components]}


def vectfield_from_json(doc: dict) -> VectField:
    m = _int(doc, "m")
    comps = _polys(doc.get("components"), m, "components")
    if len(comps) != m:
        raise FormatError(f"vector field has {len(comps)} components, expected {m}")
    return _wrap(VectField, tuple(comps))


def pair_to_json(p: SplitPair) -> dict:
    return {
        "m": p.A.m,
        "n": p.A.n,
        "X": [u.render() for u in p.X.components],
        "A": matrix_to_json(p.A),
    }


def pair_from_json(doc: dict) -> SplitPair:
    m, n = _int(doc, "m"), _int(doc, "n", 2)
    comps = _polys(doc.get("X"), m, "X")
    if len(comps) != m:
        raise FormatError(f"X has {len(comps)} components, expected {m}")
    return _wrap(SplitPair, _wrap(VectField, tuple(comps)), matrix_from_json(doc.get("A"), m, n))
