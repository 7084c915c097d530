"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

All comparisons are exact rational equalities.  Lines are echoed in the
terminal summary under "acceptance criteria".
"""
import subprocess
import sys
import time

import pytest

from bundlesym.connection import trace_decompose
from bundlesym.diffop import d_order, is_in_Pk, p_order_oracle
from bundlesym.harness.gen import Gen, GenConfig, trial_seed
from bundlesym.harness.suites import exhaustive_family, run_suite
from conftest import record_acceptance

pytestmark = pytest.mark.acceptance


def verdict(number: int, ok: bool, detail: str) -> None:
    record_acceptance(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}")
    assert ok, detail


def suite(name: str, **cfg):
    rep = run_suite(name, GenConfig(**cfg))
    return rep, rep.counts


def test_01_filtration_laws():
    start = time.perf_counter()
    pairs, failures = 0, 0
    for n in (2, 3):
        rep, counts = suite("filtration", seed=101, trials=200, m=2, n=n, max_order=3, max_deg=2)
        failures += len(rep.failures)
        pairs += min(counts["product-law"], counts["bracket-law"])
    elapsed = time.perf_counter() - start
    ok = failures == 0 and pairs >= 400 and elapsed <= 60
    verdict(1, ok, f"{pairs} pairs over n in (2, 3), {failures} failures, {elapsed:.1f}s (limit 60s)")


def test_02_membership_criterion():
    disagreements, compared = 0, 0
    for t in exhaustive_family(m=2, n=2, max_order=2):
        for k in range(4):
            compared += 1
            disagreements += is_in_Pk(t, k) != p_order_oracle(t, k)
    family = compared
    randoms = 0
    for m, n, count in ((2, 2, 100), (2, 3, 60), (1, 2, 20), (1, 3, 20)):
        cfg = GenConfig(seed=202, m=m, n=n, max_order=3, max_deg=2)
        for i in range(count):
            t = Gen(cfg, trial_seed(cfg.seed, i)).diffop()
            randoms += 1
            for k in range(d_order(t) + 2):
                compared += 1
                disagreements += is_in_Pk(t, k) != p_order_oracle(t, k)
    ok = disagreements == 0 and randoms >= 200
    verdict(2, ok, f"{family} family checks + {randoms} random operators ({compared} memberships), {disagreements} disagreements")


def test_03_symbol_oracle():
    failures, muls, brackets = 0, 0, 0
    for n, trials in ((2, 200), (3, 60)):
        rep, counts = suite("symbol-oracle", seed=303, trials=trials, n=n, max_order=3)
        failures += len(rep.failures)
        muls += counts["mul-closed-vs-representatives"]
        brackets += counts["bracket-closed-vs-representatives"]
    ok = failures == 0 and min(muls, brackets) >= 200
    verdict(3, ok, f"{muls} products and {brackets} brackets vs representatives, {failures} failures")


LAWS = ("mul-commutative", "mul-associative", "bracket-antisymmetric", "bracket-jacobi", "leibniz")


def test_04_poisson_laws():
    rep, counts = suite("poisson-laws", seed=404, trials=200, max_order=3)
    least = min(counts[law] for law in LAWS)
    ok = not rep.failures and least >= 100
    detail = ", ".join(f"{law}={counts[law]}" for law in LAWS)
    verdict(4, ok, f"{detail}; {len(rep.failures)} failures")


def test_05_gl_case():
    rep, counts = suite("gl-case", seed=505, trials=100)
    checks = ("gamma-times-A", "A-times-B-vanishes", "bracket-is-commutator", "gl-mul-degree1", "gl-bracket-degree1")
    least = min(counts[c] for c in checks)
    ok = not rep.failures and least >= 100
    verdict(5, ok, f"{least} instances per identity, {len(rep.failures)} failures")


def test_06_exact_sequence():
    rep, counts = suite("exact-sequence", seed=606, trials=100)
    checks = ("delta-theta-zero", "kernel-in-image", "delta-surjective", "sigma-lift-identity")
    ok = not rep.failures and min(counts[c] for c in checks) >= 100
    detail = ", ".join(f"{c}={counts[c]}" for c in checks)
    verdict(6, ok, f"{detail}; {len(rep.failures)} failures")


def test_07_splitting():
    rep, counts = suite("splitting", seed=707, trials=100)
    checks = ("bracket-star-vs-operator", "metric-curvature-trace-free", "section-homomorphism", "sigma-of-section", "section-splits-sigma")
    least = min(counts[c] for c in checks)
    obstructions = sum(f["finding"] == "trace-obstruction" for f in rep.findings)
    # one fresh metric connection per trial
    ok = not rep.failures and least >= 100 and rep.trials >= 20 and obstructions >= 1
    verdict(7, ok, f"{rep.trials} metric connections, {least} pairs per identity, {obstructions} non-metric trace obstructions, {len(rep.failures)} failures")


def test_08_trace_decomposition():
    g = Gen(GenConfig(seed=808), trial_seed(808, 0))
    pairs = []
    while len(pairs) < 10:
        c1, c2 = g.connection(), g.connection()
        if c1 != c2:
            pairs.append((c1, c2))
    mismatches = 0
    ops = [g.diffop(("in_Pk", 1)) for _ in range(50)]
    for t in ops:
        for c1, c2 in pairs:
            mismatches += trace_decompose(t, c1) != trace_decompose(t, c2)
    rep, _ = suite("trace-decomposition", seed=808, trials=50)
    ok = mismatches == 0 and not rep.failures
    verdict(8, ok, f"{len(pairs)} connection pairs x {len(ops)} operators, {mismatches} mismatches; suite failures {len(rep.failures)}")


def test_09_nilpotency():
    failures, parts = 0, []
    falsified = 0
    for n in (2, 3):
        rep, counts = suite("nilpotency", seed=909, trials=100, n=n)
        failures += len(rep.failures)
        parts.append(f"n={n}: {counts['decompose-roundtrip']} round-trips, {counts['ad-nilpotent-constant']} ad checks (r <= {2 * n - 1})")
        falsified += counts["falsification-witness"]
        decompositions = counts["decompose-roundtrip"]
        if decompositions < 100:
            failures += 1
    ok = failures == 0 and falsified >= 20
    verdict(9, ok, f"{'; '.join(parts)}; {falsified} falsifications at r_max=6; {failures} failures")


def test_10_reproducible(tmp_path):
    reports, times = [], []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        start = time.perf_counter()
        proc = subprocess.run(
            [sys.executable, "-m", "bundlesym", "verify", "all", "--seed", "42", "--json", str(out), "--quiet"],
            capture_output=True, text=True,
        )
        times.append(time.perf_counter() - start)
        assert proc.returncode == 0, proc.stderr
        reports.append(out.read_bytes())
    identical = reports[0] == reports[1]
    ok = identical and max(times) <= 120
    verdict(10, ok, f"byte-identical={identical}, runs {times[0]:.1f}s and {times[1]:.1f}s (limit 120s)")
