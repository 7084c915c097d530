"""Verification suites: each bundles one family of algebraic laws.

A suite runs ``cfg.trials`` independent trials.  Trial ``i`` draws from its
own stream seeded by :func:`~bundlesym.harness.gen.trial_seed`, so any
failure can be replayed alone with ``--only-trial i``.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Any, Callable

from .. import io
from ..connection import (
    Connection,
    SplitPair,
    VectField,
    ad_nilpotency_check,
    bracket_star,
    curvature,
    curvature_components,
    lambda_decompose,
    mu,
    mu_inverse,
    nabla,
    nil_falsification,
    section_map,
    section_of_symbol,
    trace_decompose,
)
from ..diffop import (
    DiffOp,
    apply,
    commutator,
    compose,
    d_order,
    gamma,
    is_in_Pk,
    p_order,
    p_order_oracle,
)
from ..matalg import (
    MatPoly,
    decompose_nilpotent,
    is_nilpotent,
    mat_comm,
    nilpotent_basis,
    traceless_project,
)
from ..poly import Poly, multi_indices, poly_eval
from ..symbols import (
    GlSymbol,
    SymbolElem,
    bracket_via_representatives,
    delta,
    delta_of_operator,
    gl_bracket,
    gl_embed,
    gl_mul,
    lift,
    mul_via_representatives,
    sigma_i,
    sigma_pson,
    symbol_bracket,
    symbol_mul,
    theta,
)
from .gen import Gen, GenConfig, trial_seed

SUITES = (
    "poly-ring",
    "matalg",
    "operator-algebra",
    "filtration",
    "quasi-distinguishing",
    "symbol-oracle",
    "poisson-laws",
    "exact-sequence",
    "gl-case",
    "splitting",
    "trace-decomposition",
    "nilpotency",
)


class UnknownSuite(KeyError):
    pass


def _ser(obj: Any) -> Any:
    if isinstance(obj, DiffOp):
        return io.op_to_json(obj)
    if isinstance(obj, SymbolElem):
        return io.symbol_to_json(obj)
    if isinstance(obj, MatPoly):
        return io.matrix_to_json(obj)
    if isinstance(obj, Poly):
        return obj.render()
    if isinstance(obj, Connection):
        return io.connection_to_json(obj)
    if isinstance(obj, SplitPair):
        return io.pair_to_json(obj)
    if isinstance(obj, VectField):
        return io.vectfield_to_json(obj)
    if isinstance(obj, GlSymbol):
        return {"sl": io.matrix_to_json(obj.sl), "scalar": obj.scalar.render()}
    if isinstance(obj, dict):
        return {str(k): _ser(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_ser(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    return str(obj)


def rerun_command(suite: str, cfg: GenConfig, index: int) -> str:
    return (
        f"bundlesym verify {suite} --seed {cfg.seed} --m {cfg.m} --n {cfg.n} "
        f"--max-order {cfg.max_order} --max-deg {cfg.max_deg} --max-coef {cfg.max_coef} "
        f"--only-trial {index}"
    )


class Trial:
    def __init__(self, suite: str, cfg: GenConfig, index: int):
        self.suite, self.cfg, self.index = suite, cfg, index
        self.seed = trial_seed(cfg.seed, index)
        self.gen = Gen(cfg, self.seed)
        self.checks = 0
        self.counts: Counter = Counter()
        self.failures: list[dict] = []
        self.findings: list[dict] = []

    def expect(self, name: str, ok: bool, inputs: dict | None = None, expected=None, actual=None):
        self.checks += 1
        self.counts[name] += 1
        if not ok:
            self.failures.append(
                {
                    "check": name,
                    "trial": self.index,
                    "seed": self.seed,
                    "inputs": _ser(inputs or {}),
                    "expected": _ser(expected),
                    "actual": _ser(actual),
                    "rerun": rerun_command(self.suite, self.cfg, self.index),
                }
            )
        return ok

    def equal(self, name: str, expected, actual, inputs: dict | None = None):
        return self.expect(name, expected == actual, inputs, expected, actual)

    def finding(self, name: str, detail: dict):
        self.findings.append({"finding": name, "trial": self.index, **_ser(detail)})


@dataclass
class VerifyReport:
    suite: str
    trials: int
    checks: int = 0
    counts: Counter = field(default_factory=Counter)
    failures: list = field(default_factory=list)
    findings: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self, timing: bool = False) -> dict:
        doc = {
            "suite": self.suite,
            "passed": self.passed,
            "trials": self.trials,
            "checks": self.checks,
            "check_counts": dict(sorted(self.counts.items())),
            "failures": self.failures,
            "findings": self.findings,
        }
        if timing:
            doc["wall_time"] = round(self.wall_time, 3)
        return doc

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = (
            f"{status} {self.suite}: {self.trials} trials, {self.checks} checks, "
            f"{len(self.failures)} failures, {len(self.findings)} findings ({self.wall_time:.2f}s)"
        )
        out = [line]
        for f in self.failures[:10]:
            out.append(f"  - {f['check']} (trial {f['trial']}): rerun with `{f['rerun']}`")
        if len(self.failures) > 10:
            out.append(f"  ... {len(self.failures) - 10} more")
        return "\n".join(out)


# poly-ring --------------------------------------------------------------


def _poly_ring(t: Trial):
    g = t.gen
    p, q, r = g.poly(), g.poly(), g.poly()
    inp = {"p": p, "q": q, "r": r}
    t.equal("add-associative", (p + q) + r, p + (q + r), inp)
    t.equal("add-commutative", p + q, q + p, inp)
    t.equal("mul-associative", (p * q) * r, p * (q * r), inp)
    t.equal("mul-commutative", p * q, q * p, inp)
    t.equal("distributive", p * (q + r), p * q + p * r, inp)
    t.equal("additive-inverse", p + (-p), Poly.zero(g.m), inp)
    t.equal("unit", p * Poly.one(g.m), p, inp)
    i = g.rng.randrange(g.m)
    j = g.rng.randrange(g.m)
    t.equal("derivation", (p * q).diff(i), p.diff(i) * q + p * q.diff(i), {**inp, "axis": i})
    t.equal("mixed-partials", p.diff(i).diff(j), p.diff(j).diff(i), {**inp, "i": i, "j": j})
    pt = g.point()
    t.equal("eval-additive", poly_eval(p + q, pt), poly_eval(p, pt) + poly_eval(q, pt), inp)
    t.equal("eval-multiplicative", poly_eval(p * q, pt), poly_eval(p, pt) * poly_eval(q, pt), inp)
    t.equal("parse-render", Poly.parse(p.render(), g.m), p, inp)


# matalg -----------------------------------------------------------------


def _matalg(t: Trial):
    g = t.gen
    a, b, c = g.matrix(), g.matrix(), g.matrix()
    inp = {"a": a, "b": b, "c": c}
    jac = mat_comm(a, mat_comm(b, c)) + mat_comm(b, mat_comm(c, a)) + mat_comm(c, mat_comm(a, b))
    t.expect("jacobi", jac.is_zero(), inp, None, jac)
    t.expect("trace-of-commutator", not mat_comm(a, b).trace(), inp)
    pa = traceless_project(a)
    t.expect("traceless-has-zero-trace", not pa.trace(), inp)
    t.equal("traceless-idempotent", pa, traceless_project(pa), inp)
    t.equal("traceless-linear", traceless_project(a + b), pa + traceless_project(b), inp)
    u = g.poly()
    s = MatPoly.scalar(u, g.n) + pa
    t.equal("traceless-removes-scalar", traceless_project(s), pa, {**inp, "u": u})
    t.equal("scalar-witness", MatPoly.scalar(u, g.n).scalar_witness(), u, {"u": u})
    parts = decompose_nilpotent(pa)
    total = MatPoly.zero(g.n, g.m)
    for coeff, mat in parts:
        total = total + mat.scale(coeff)
        t.expect("summand-nilpotent", is_nilpotent(mat.scale(coeff)), {"matrix": mat, "coeff": coeff})
    t.equal("decompose-roundtrip", pa, total, {"a": pa})
    if t.index == 0:
        basis = nilpotent_basis(g.n, g.m)
        t.equal("basis-size", g.n * g.n - 1, len(basis))
        for n_mat in basis:
            t.expect("basis-nilpotent", (n_mat ** g.n).is_zero(), {"N": n_mat})
            t.expect("basis-trace-free", not n_mat.trace(), {"N": n_mat})
        t.equal("basis-rank", g.n * g.n - 1, _rank([_flatten(x) for x in basis]))


def _flatten(a: MatPoly) -> list:
    return [p.constant_value() for p in a.entries()]


def _rank(rows: list[list]) -> int:
    rows = [r[:] for r in rows]
    rank, cols = 0, len(rows[0]) if rows else 0
    for col in range(cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


# operator-algebra -------------------------------------------------------


def _operator_algebra(t: Trial):
    g = t.gen
    top = min(g.cfg.max_order, 2)
    a, b, c = (g.diffop(max_order=top) for _ in range(3))
    inp = {"t": a, "d": b, "e": c}
    t.equal("compose-associative", compose(compose(a, b), c), compose(a, compose(b, c)), inp)
    t.equal("compose-left-linear", compose(a + b, c), compose(a, c) + compose(b, c), inp)
    t.equal("compose-right-linear", compose(a, b + c), compose(a, b) + compose(a, c), inp)
    s = g.section()
    t.equal("apply-compose", apply(compose(a, b), s), apply(a, apply(b, s)), {**inp, "s": s.components})
    ab = commutator(a, b)
    t.equal("commutator-antisymmetric", -ab, commutator(b, a), inp)
    jac = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, ab)
    t.expect("commutator-jacobi", jac.is_zero(), inp, None, jac)


# filtration -------------------------------------------------------------


def _filtration(t: Trial):
    g = t.gen
    j = g.rng.randint(0, g.cfg.max_order)
    k = g.rng.randint(0, g.cfg.max_order)
    a = g.diffop(("in_Pk", j))
    b = g.diffop(("in_Pk", k))
    inp = {"t": a, "d": b, "j": j, "k": k}
    t.expect("generator-respects-constraint", is_in_Pk(a, j) and is_in_Pk(b, k), inp)
    prod = compose(a, b)
    t.expect("product-law", is_in_Pk(prod, j + k), inp, j + k, prod)
    br = commutator(a, b)
    if j + k >= 1:
        t.expect("bracket-law", is_in_Pk(br, j + k - 1), inp, j + k - 1, br)
    else:
        t.expect("bracket-law", br.is_zero(), inp, 0, br)
    free = g.diffop("any")
    pf = p_order(free)
    t.expect("product-law-free", is_in_Pk(compose(free, a), pf + j), {"t": free, "d": a, "j": j})
    for op in (a, b, free):
        d = d_order(op)
        t.expect("p-order-range", p_order(op) in (d, d + 1), {"t": op})
        first = next(kk for kk in range(d + 2) if is_in_Pk(op, kk))
        t.equal("p-order-minimal", first, p_order(op), {"t": op})


# quasi-distinguishing ---------------------------------------------------


def _commutes_with_coordinates(op: DiffOp) -> bool:
    return all(commutator(op, gamma(Poly.var(op.m, i), op.n)).is_zero() for i in range(1, op.m + 1))


def exhaustive_family(m: int = 2, n: int = 2, max_order: int = 2) -> list[DiffOp]:
    """Single-term operators with coefficient in {id, E12, x1 id, x1 E12}."""
    x1 = Poly.var(m, 1)
    coeffs = [
        MatPoly.identity(n, m),
        MatPoly.unit(n, m, 0, 1),
        MatPoly.scalar(x1, n),
        MatPoly.unit(n, m, 0, 1, x1),
    ]
    ops = []
    for order in range(max_order + 1):
        for alpha in sorted(multi_indices(m, order)):
            for c in coeffs:
                ops.append(DiffOp(m, n, {alpha: c}))
    return ops


def _quasi_distinguishing(t: Trial):
    g = t.gen
    op = g.diffop()
    commutes = _commutes_with_coordinates(op)
    t.equal("commute-iff-order-zero", d_order(op) == 0, commutes, {"t": op})
    a = g.matrix()
    t.expect("endomorphism-commutes", _commutes_with_coordinates(DiffOp.multiplication(a)), {"a": a})
    t.expect("endomorphism-in-P1", is_in_Pk(DiffOp.multiplication(a), 1), {"a": a})
    small = g.diffop(max_order=min(g.cfg.max_order, 3))
    k = g.rng.randint(0, d_order(small) + 1)
    t.equal("criterion-vs-oracle", p_order_oracle(small, k), is_in_Pk(small, k), {"t": small, "k": k})
    if t.index == 0:
        for fam in exhaustive_family(g.m, g.n):
            for kk in range(4):
                t.equal(
                    "exhaustive-criterion-vs-oracle",
                    p_order_oracle(fam, kk),
                    is_in_Pk(fam, kk),
                    {"t": fam, "k": kk},
                )


# symbol-oracle ----------------------------------------------------------


def _symbol_oracle(t: Trial):
    g = t.gen
    i = g.rng.randint(0, g.cfg.max_order)
    j = g.rng.randint(0, g.cfg.max_order)
    p, q = g.symbol(i), g.symbol(j)
    inp = {"p": p, "q": q}
    t.equal("mul-closed-vs-representatives", mul_via_representatives(p, q), symbol_mul(p, q), inp)
    t.equal(
        "bracket-closed-vs-representatives",
        bracket_via_representatives(p, q),
        symbol_bracket(p, q),
        inp,
    )


# poisson-laws -----------------------------------------------------------


def _poisson_laws(t: Trial):
    g = t.gen
    top = g.cfg.max_order
    p, q, r = (g.symbol(g.rng.randint(0, top)) for _ in range(3))
    inp = {"p": p, "q": q, "r": r}
    t.equal("mul-commutative", symbol_mul(p, q), symbol_mul(q, p), inp)
    t.equal("mul-associative", symbol_mul(symbol_mul(p, q), r), symbol_mul(p, symbol_mul(q, r)), inp)
    dp, dq, dr = p.degree, q.degree, r.degree
    pq = symbol_bracket(p, q)
    if dp + dq >= 1:
        t.equal("bracket-antisymmetric", -pq, symbol_bracket(q, p), inp)
    # brackets of two degree-0 symbols collapse to degree 0, so the graded
    # identities are only compared where every intermediate degree is honest
    if min(dp + dq, dq + dr, dr + dp) >= 1 and dp + dq + dr >= 2:
        jac = (
            symbol_bracket(p, symbol_bracket(q, r))
            + symbol_bracket(q, symbol_bracket(r, p))
            + symbol_bracket(r, pq)
        )
        t.expect("bracket-jacobi", jac.is_zero(), inp, None, jac)
    if dp + dq >= 1 and dp + dr >= 1:
        lhs = symbol_bracket(p, symbol_mul(q, r))
        rhs = symbol_mul(pq, r) + symbol_mul(q, symbol_bracket(p, r))
        t.equal("leibniz", rhs, lhs, inp)
    a = g.diffop(("in_Pk", g.rng.randint(0, top)))
    b = g.diffop(("in_Pk", g.rng.randint(0, top)))
    prod = compose(a, b)
    if not prod.is_zero() and p_order(prod) == p_order(a) + p_order(b):
        t.equal(
            "sigma-homomorphism",
            symbol_mul(sigma_pson(a), sigma_pson(b)),
            sigma_pson(prod),
            {"t": a, "d": b},
        )
    ia, ib = p_order(a), p_order(b)
    if ia >= 1:
        lower = g.diffop(("in_Pk", ia - 1))
        a2 = a + lower
        inp2 = {"t": a, "t_prime": a2, "d": b}
        t.equal(
            "product-representative-independent",
            sigma_i(compose(a, b), ia + ib),
            sigma_i(compose(a2, b), ia + ib),
            inp2,
        )
        if ia + ib >= 1:
            t.equal(
                "bracket-representative-independent",
                sigma_i(commutator(a, b), ia + ib - 1),
                sigma_i(commutator(a2, b), ia + ib - 1),
                inp2,
            )


# exact-sequence ---------------------------------------------------------


def _exact_sequence(t: Trial):
    g = t.gen
    k = g.rng.randint(1, max(1, g.cfg.max_order))
    tsym = g.symbol(k, scalar=False)
    emb = theta(tsym)
    t.expect("delta-theta-zero", not delta(emb), {"T": tsym})
    t.equal("delta-theta-operator-level", {}, delta_of_operator(lift(emb), k), {"T": tsym})
    if not tsym.is_zero():
        t.expect("theta-injective", not is_in_Pk(lift(emb), k - 1), {"T": tsym})
    low = g.diffop("any", max_order=k - 1)
    cls = sigma_i(low, k)
    t.expect("kernel-of-delta", not delta(cls), {"t": low, "k": k})
    t.equal("kernel-in-image", cls, theta(SymbolElem(g.m, g.n, k, {}, cls.sl)), {"t": low, "k": k})
    p = g.symbol(g.rng.randint(0, g.cfg.max_order))
    t.equal("delta-operator-vs-symbol", delta(p), delta_of_operator(lift(p), p.degree), {"p": p})
    f = g.symbol(k).scalar
    pre = DiffOp(g.m, g.n, {beta: MatPoly.scalar(u, g.n) for beta, u in f.items()})
    t.equal("delta-surjective", f, delta(sigma_i(pre, k)), {"f": f})
    nz = g.nonzero_symbol(g.rng.randint(0, g.cfg.max_order))
    t.equal("sigma-lift-identity", nz, sigma_pson(lift(nz)), {"p": nz})
    op = g.diffop()
    kk = p_order(op)
    rest = op - lift(sigma_pson(op))
    ok = rest.is_zero() or (kk >= 1 and is_in_Pk(rest, kk - 1))
    t.expect("lift-sigma-mod-lower", ok, {"t": op}, None, rest)


# gl-case ----------------------------------------------------------------


def _gl_case(t: Trial):
    g = t.gen
    m, n = g.m, g.n
    a, b = g.nonscalar_matrix(), g.nonscalar_matrix()
    u = g.poly(nonzero=True)
    inp = {"A": a, "B": b, "u": u}
    sa, sb = sigma_pson(DiffOp.multiplication(a)), sigma_pson(DiffOp.multiplication(b))
    su = sigma_pson(gamma(u, n))
    t.equal("sigma-of-A", SymbolElem(m, n, 1, {}, {(0,) * m: traceless_project(a)}), sa, inp)
    t.equal(
        "gamma-times-A",
        SymbolElem(m, n, 1, {}, {(0,) * m: traceless_project(a).scale(u)}),
        symbol_mul(su, sa),
        inp,
    )
    t.equal("A-times-B-vanishes", SymbolElem.zero(m, n, 2), symbol_mul(sa, sb), inp)
    comm = DiffOp.multiplication(mat_comm(a, b))
    t.equal("bracket-is-commutator", sigma_i(comm, 1), symbol_bracket(sa, sb), inp)
    x, y = g.gl_symbol(), g.gl_symbol()
    inp2 = {"a": x, "b": y}
    x0, x1 = gl_embed(x)
    y0, y1 = gl_embed(y)
    prod = gl_mul(x, y)
    deg1 = symbol_mul(x0, y1) + symbol_mul(x1, y0)
    t.equal("gl-mul-degree1", gl_embed(prod)[1], deg1, inp2)
    t.equal("gl-mul-degree0", gl_embed(prod)[0], symbol_mul(x0, y0), inp2)
    t.equal("gl-mul-sl-sl-vanishes", SymbolElem.zero(m, n, 2), symbol_mul(x1, y1), inp2)
    br = gl_bracket(x, y)
    t.equal("gl-bracket-degree1", gl_embed(br)[1], symbol_bracket(x1, y1), inp2)
    zero0 = SymbolElem.zero(m, n, 0)
    t.equal("gl-bracket-cross-terms", zero0, symbol_bracket(x0, y1) + symbol_bracket(x1, y0), inp2)
    t.expect("gl-bracket-scalar-zero", not br.scalar, inp2)
    t.equal("gl-bracket-self", GlSymbol(MatPoly.zero(n, m), Poly.zero(m)), gl_bracket(x, x), inp2)


# splitting --------------------------------------------------------------


def _op_of(p: SplitPair, c: Connection) -> DiffOp:
    return nabla(c, p.X) + DiffOp.multiplication(p.A)


def _splitting(t: Trial):
    g = t.gen
    c = g.connection(metric=True)
    p, q = g.pair(trace_free=False), g.pair(trace_free=False)
    inp = {"connection": c, "p": p, "q": q}
    star = bracket_star(p, q, c)
    oracle = lambda_decompose(commutator(_op_of(p, c), _op_of(q, c)), c)
    t.equal("bracket-star-vs-operator", oracle, star, inp)
    X, Y = p.X, q.X
    r = curvature(c, X, Y)
    t.equal("curvature-closed-form", r, curvature_components(c, X, Y), inp)
    t.expect("metric-curvature-trace-free", not r.trace(), inp, None, r.trace())
    ps, qs, rs = (g.pair(trace_free=True) for _ in range(3))
    inp = {"connection": c, "p": ps, "q": qs, "r": rs}
    st = bracket_star(ps, qs, c)
    t.expect("bracket-star-preserves-sl", not st.A.trace(), inp, None, st.A)
    t.equal(
        "section-homomorphism",
        commutator(section_map(ps, c), section_map(qs, c)),
        section_map(st, c),
        inp,
    )
    t.equal("mu-homomorphism", symbol_bracket(mu(ps, c), mu(qs, c)), mu(st, c), inp)
    m = g.m
    expected = SymbolElem(
        m,
        g.n,
        1,
        {tuple(int(j == i) for j in range(m)): x for i, x in enumerate(ps.X.components)},
        {(0,) * m: ps.A + c.contract(ps.X)},
    )
    t.equal("sigma-of-section", expected, mu(ps, c), inp)
    t.equal("mu-inverse", ps, mu_inverse(mu(ps, c), c), inp)
    s1 = g.nonzero_symbol(1)
    t.equal("section-splits-sigma", s1, sigma_pson(section_of_symbol(s1, c)), {"connection": c, "s": s1})
    jac_terms = [
        bracket_star(ps, bracket_star(qs, rs, c), c),
        bracket_star(qs, bracket_star(rs, ps, c), c),
        bracket_star(rs, bracket_star(ps, qs, c), c),
    ]
    jx = jac_terms[0].X + jac_terms[1].X + jac_terms[2].X
    ja = jac_terms[0].A + jac_terms[1].A + jac_terms[2].A
    t.expect("bracket-star-jacobi", jx.is_zero() and ja.is_zero(), inp, None, ja)
    # non-metric connection: look for the trace obstruction
    bad = g.connection(metric=False)
    probes = [
        (SplitPair(VectField.coordinate(m, 1), MatPoly.zero(g.n, m)),
         SplitPair(VectField.coordinate(m, min(2, m)), MatPoly.zero(g.n, m))),
        (ps, qs),
    ]
    for a_pair, b_pair in probes:
        out = bracket_star(a_pair, b_pair, bad)
        t.equal(
            "non-metric-bracket-star-vs-operator",
            lambda_decompose(commutator(_op_of(a_pair, bad), _op_of(b_pair, bad)), bad),
            out,
            {"connection": bad, "p": a_pair, "q": b_pair},
        )
        if out.A.trace():
            t.finding(
                "trace-obstruction",
                {"connection": bad, "p": a_pair, "q": b_pair, "trace": out.A.trace()},
            )
            break


def _splitting_final(report: VerifyReport, cfg: GenConfig):
    report.checks += 1
    report.counts["non-metric-obstruction-detected"] += 1
    if not any(f["finding"] == "trace-obstruction" for f in report.findings):
        report.failures.append(
            {
                "check": "non-metric-obstruction-detected",
                "trial": None,
                "seed": cfg.seed,
                "inputs": {},
                "expected": "at least one trace obstruction",
                "actual": "none found",
                "rerun": f"bundlesym verify splitting --seed {cfg.seed} --trials {cfg.trials}",
            }
        )


# trace-decomposition ----------------------------------------------------


def _trace_decomposition(t: Trial):
    g = t.gen
    c = g.connection(metric=True)
    while True:
        other = g.connection(metric=True)
        if any(not x.is_zero() for x in other.gamma):
            break
    c2 = c + other
    op = g.diffop(("in_Pk", 1))
    inp = {"connection": c, "connection2": c2, "t": op}
    t.expect("second-connection-metric-and-distinct", c2.metric and c2 != c, inp)
    adj1, u1 = trace_decompose(op, c)
    adj2, u2 = trace_decompose(op, c2)
    t.equal("adjusted-operator-independent", adj1, adj2, inp)
    t.equal("scalar-part-independent", u1, u2, inp)
    t.equal("reconstruction", op, adj1 + gamma(u1, g.n), inp)
    pair = lambda_decompose(op, c)
    t.equal("lambda-roundtrip", op, _op_of(pair, c), inp)


# nilpotency -------------------------------------------------------------


def _nilpotency(t: Trial):
    g = t.gen
    n, m = g.n, g.m
    a = g.traceless()
    total = MatPoly.zero(n, m)
    for coeff, mat in decompose_nilpotent(a):
        t.expect("summand-nilpotent", is_nilpotent(mat.scale(coeff)), {"A": a})
        total = total + mat.scale(coeff)
    t.equal("decompose-roundtrip", a, total, {"A": a})
    flat = Connection.flat(m, n)
    nil = g.constant_nilpotent()
    targets = [g.pair(trace_free=True) for _ in range(g.rng.randint(1, 3))]
    inp = {"A": nil, "targets": targets}
    t.expect("constant-nilpotent", is_nilpotent(nil), inp)
    r = ad_nilpotency_check(nil, targets, flat, 2 * n - 1)
    t.expect("ad-nilpotent-constant", r is not None and r <= 2 * n - 1, inp, 2 * n - 1, r)
    poly_nil = g.strictly_upper(constant=False)
    metric = g.connection(metric=True)
    r2 = ad_nilpotency_check(poly_nil, targets, metric, 8)
    t.expect("ad-nilpotent-polynomial", r2 is not None, {"A": poly_nil, "targets": targets}, 8, r2)
    pair = g.pair(trace_free=False, nonzero_field=True)
    w = nil_falsification(pair, r_max=6)
    t.expect("falsification-witness", w.confirmed, {"T": pair}, 6, len(w.iterates))


_SUITE_FUNCS: dict[str, Callable[[Trial], None]] = {
    "poly-ring": _poly_ring,
    "matalg": _matalg,
    "operator-algebra": _operator_algebra,
    "filtration": _filtration,
    "quasi-distinguishing": _quasi_distinguishing,
    "symbol-oracle": _symbol_oracle,
    "poisson-laws": _poisson_laws,
    "exact-sequence": _exact_sequence,
    "gl-case": _gl_case,
    "splitting": _splitting,
    "trace-decomposition": _trace_decomposition,
    "nilpotency": _nilpotency,
}

_FINALIZERS = {"splitting": _splitting_final}


def run_suite(name: str, cfg: GenConfig, only_trial: int | None = None) -> VerifyReport:
    """Run one named suite; ``only_trial`` replays a single trial index."""
    if name not in _SUITE_FUNCS:
        raise UnknownSuite(name)
    func = _SUITE_FUNCS[name]
    indices = [only_trial] if only_trial is not None else range(cfg.trials)
    report = VerifyReport(name, len(indices))
    start = time.perf_counter()
    for i in indices:
        trial = Trial(name, cfg, i)
        try:
            func(trial)
        except Exception as exc:  # a crash is a failure of the trial, never a silent pass
            trial.failures.append(
                {
                    "check": "exception",
                    "trial": i,
                    "seed": trial.seed,
                    "inputs": {},
                    "expected": None,
                    "actual": f"{type(exc).__name__}: {exc}",
                    "rerun": rerun_command(name, cfg, i),
                }
            )
        report.checks += trial.checks
        report.counts.update(trial.counts)
        report.failures.extend(trial.failures)
        report.findings.extend(trial.findings)
    if only_trial is None and name in _FINALIZERS:
        _FINALIZERS[name](report, cfg)
    report.wall_time = time.perf_counter() - start
    return report


def run_all(cfg: GenConfig) -> list[VerifyReport]:
    return [run_suite(name, cfg) for name in SUITES]


def reports_to_json(reports: list[VerifyReport], cfg: GenConfig, timing: bool = False) -> dict:
    return {
        "config": cfg.to_json(),
        "passed": all(r.passed for r in reports),
        "suites": [r.to_json(timing) for r in reports],
    }
