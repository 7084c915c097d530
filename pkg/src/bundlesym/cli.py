"""Command line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .connection import SplittingError, curvature, section_map, trace_decompose
from .diffop import OperatorError, apply, commutator, compose, d_order, p_order
from .harness.gen import GenConfig, GenError
from .harness.suites import SUITES, UnknownSuite, reports_to_json, run_suite
from .symbols import SymbolError, lift, sigma_ppal, sigma_pson, symbol_bracket, symbol_mul

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(doc, out: str | None) -> None:
    text = io.dumps(doc)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _same_shape(a, b, what: str) -> None:
    if (a.m, a.n) != (b.m, b.n):
        raise UsageError(f"{what}: shapes differ (m={a.m}, n={a.n}) vs (m={b.m}, n={b.n})")


# op ---------------------------------------------------------------------


def cmd_op_order(args) -> int:
    t = io.op_from_json(io.load(args.file))
    if t.is_zero():
        doc = {"zero": True, "d_order": None, "p_order": None}
    else:
        doc = {"zero": False, "d_order": d_order(t), "p_order": p_order(t)}
    _emit(doc, args.output)
    return EXIT_OK


def cmd_op_apply(args) -> int:
    t = io.op_from_json(io.load(args.op_file))
    s = io.section_from_json(io.load(args.section_file))
    _same_shape(t, s, "op apply")
    _emit(io.section_to_json(apply(t, s)), args.output)
    return EXIT_OK


def cmd_op_compose(args) -> int:
    a = io.op_from_json(io.load(args.f1))
    b = io.op_from_json(io.load(args.f2))
    _same_shape(a, b, "op compose")
    _emit(io.op_to_json(compose(a, b)), args.output)
    return EXIT_OK


def cmd_op_bracket(args) -> int:
    a = io.op_from_json(io.load(args.f1))
    b = io.op_from_json(io.load(args.f2))
    _same_shape(a, b, "op bracket")
    _emit(io.op_to_json(commutator(a, b)), args.output)
    return EXIT_OK


# sym --------------------------------------------------------------------


def cmd_sym_of(args) -> int:
    t = io.op_from_json(io.load(args.op_file))
    if t.is_zero():
        raise UsageError("the zero operator has no symbol")
    if args.kind == "ppal":
        doc = io.principal_to_json(t.m, t.n, sigma_ppal(t))
        doc["order"] = d_order(t)
    else:
        doc = io.symbol_to_json(sigma_pson(t))
    _emit(doc, args.output)
    return EXIT_OK


def cmd_sym_mul(args) -> int:
    p = io.symbol_from_json(io.load(args.s1))
    q = io.symbol_from_json(io.load(args.s2))
    _same_shape(p, q, "sym mul")
    _emit(io.symbol_to_json(symbol_mul(p, q)), args.output)
    return EXIT_OK


def cmd_sym_bracket(args) -> int:
    p = io.symbol_from_json(io.load(args.s1))
    q = io.symbol_from_json(io.load(args.s2))
    _same_shape(p, q, "sym bracket")
    _emit(io.symbol_to_json(symbol_bracket(p, q)), args.output)
    return EXIT_OK


def cmd_sym_lift(args) -> int:
    p = io.symbol_from_json(io.load(args.s))
    _emit(io.op_to_json(lift(p)), args.output)
    return EXIT_OK


# conn -------------------------------------------------------------------


def cmd_conn_curvature(args) -> int:
    c = io.connection_from_json(io.load(args.conn))
    X = io.vectfield_from_json(io.load(args.x))
    Y = io.vectfield_from_json(io.load(args.y))
    if X.m != c.m or Y.m != c.m:
        raise UsageError("vector fields and connection disagree on m")
    r = curvature(c, X, Y)
    _emit({"m": c.m, "n": c.n, "metric": c.metric, "curvature": io.matrix_to_json(r)}, args.output)
    return EXIT_OK


def cmd_conn_section(args) -> int:
    c = io.connection_from_json(io.load(args.conn))
    pair = io.pair_from_json(io.load(args.pair_file))
    if (pair.A.m, pair.A.n) != (c.m, c.n):
        raise UsageError("pair and connection shapes differ")
    _emit(io.op_to_json(section_map(pair, c)), args.output)
    return EXIT_OK


def cmd_conn_trace_decompose(args) -> int:
    c = io.connection_from_json(io.load(args.conn))
    t = io.op_from_json(io.load(args.op_file))
    _same_shape(t, c, "conn trace-decompose")
    adjusted, u = trace_decompose(t, c)
    _emit({"operator": io.op_to_json(adjusted), "scalar": u.render()}, args.output)
    return EXIT_OK


# verify -----------------------------------------------------------------


def cmd_verify(args) -> int:
    try:
        cfg = GenConfig(
            seed=args.seed,
            trials=args.trials,
            m=args.m,
            n=args.n,
            max_order=args.max_order,
            max_deg=args.max_deg,
            max_coef=args.max_coef,
        )
    except GenError as exc:
        raise UsageError(str(exc)) from exc
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        try:
            rep = run_suite(name, cfg, only_trial=args.only_trial)
        except UnknownSuite:
            raise UsageError(f"unknown suite {name!r}; choose from: all, {', '.join(SUITES)}")
        reports.append(rep)
        print(rep.render(), file=sys.stderr if args.quiet else sys.stdout)
    doc = reports_to_json(reports, cfg, timing=args.timing)
    if args.json:
        Path(args.json).write_text(io.dumps(doc))
    ok = doc["passed"]
    print(("all suites passed" if ok else "verification FAILED"), file=sys.stderr if args.quiet else sys.stdout)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bundlesym",
        description="Exact calculus of matrix-coefficient differential operators and their symbols.",
    )
    top = parser.add_subparsers(dest="group", required=True)

    def out_opt(p):
        p.add_argument("-o", "--output", help="write JSON here instead of stdout")

    op = top.add_parser("op", help="operator algebra").add_subparsers(dest="cmd", required=True)
    p = op.add_parser("order", help="usual and filtration order")
    p.add_argument("file")
    out_opt(p)
    p.set_defaults(func=cmd_op_order)
    p = op.add_parser("apply", help="apply an operator to a section")
    p.add_argument("op_file")
    p.add_argument("section_file")
    out_opt(p)
    p.set_defaults(func=cmd_op_apply)
    for name, func in (("compose", cmd_op_compose), ("bracket", cmd_op_bracket)):
        p = op.add_parser(name)
        p.add_argument("f1")
        p.add_argument("f2")
        out_opt(p)
        p.set_defaults(func=func)

    sym = top.add_parser("sym", help="graded symbols").add_subparsers(dest="cmd", required=True)
    p = sym.add_parser("of", help="symbol of an operator")
    p.add_argument("op_file")
    p.add_argument("--kind", choices=("pson", "ppal"), default="pson")
    out_opt(p)
    p.set_defaults(func=cmd_sym_of)
    for name, func in (("mul", cmd_sym_mul), ("bracket", cmd_sym_bracket)):
        p = sym.add_parser(name)
        p.add_argument("s1")
        p.add_argument("s2")
        out_opt(p)
        p.set_defaults(func=func)
    p = sym.add_parser("lift", help="chart representative of a symbol")
    p.add_argument("s")
    out_opt(p)
    p.set_defaults(func=cmd_sym_lift)

    conn = top.add_parser("conn", help="connections").add_subparsers(dest="cmd", required=True)
    p = conn.add_parser("curvature")
    p.add_argument("conn")
    p.add_argument("--x", required=True, help="vector-field file")
    p.add_argument("--y", required=True, help="vector-field file")
    out_opt(p)
    p.set_defaults(func=cmd_conn_curvature)
    p = conn.add_parser("section", help="splitting nabla_X + A for a metric connection")
    p.add_argument("conn")
    p.add_argument("pair_file")
    out_opt(p)
    p.set_defaults(func=cmd_conn_section)
    p = conn.add_parser("trace-decompose")
    p.add_argument("conn")
    p.add_argument("op_file")
    out_opt(p)
    p.set_defaults(func=cmd_conn_trace_decompose)

    p = top.add_parser("verify", help="run verification suites")
    p.add_argument("suite", help="suite name or 'all'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--max-order", type=int, default=3)
    p.add_argument("--max-deg", type=int, default=2)
    p.add_argument("--max-coef", type=int, default=5)
    p.add_argument("--only-trial", type=int, default=None, help="replay a single trial index")
    p.add_argument("--json", help="write the machine-readable report here")
    p.add_argument("--timing", action="store_true", help="include wall times in the JSON report")
    p.add_argument("--quiet", action="store_true", help="send the text report to stderr")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, io.FormatError, OperatorError, SymbolError, SplittingError, ValueError) as exc:
        print(f"bundlesym: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
