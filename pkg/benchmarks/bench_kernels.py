"""Compare the compiled and pure-Python polynomial backends.

    python3 benchmarks/bench_kernels.py [--repeat N]

Part one times the raw kernels on random term maps.  Part two runs the same
operator workload end to end in two subprocesses, one per backend, selected
through ``BUNDLESYM_PURE_PYTHON``.
"""
import argparse
import os
import random
import subprocess
import sys
import timeit

from bundlesym import _kernels_py, kernels

WORKLOAD = """
import time
from bundlesym import BACKEND
from bundlesym.diffop import compose
from bundlesym.harness.gen import Gen, GenConfig
from bundlesym.poly import Poly

g = Gen(GenConfig(seed=1, max_order=3, max_deg=3, max_coef=9), seed=1)
ops = [g.diffop(density=0.8) for _ in range(24)]
polys = [g.poly(max_deg=6, max_terms=12) for _ in range(60)]
start = time.perf_counter()
for a, b in zip(ops, ops[1:]):
    compose(a, b)
mid = time.perf_counter()
acc = Poly.one(2)
for p in polys:
    acc = (acc * p + p) if acc.degree < 40 else p * p
end = time.perf_counter()
print(BACKEND, f"{mid - start:.3f}", f"{end - mid:.3f}")
"""


def random_terms(rng, size, max_exp=12):
    w = kernels.WIDTH
    return {
        (rng.randrange(max_exp) << w) | rng.randrange(max_exp): rng.randint(-10**6, 10**6) or 1
        for _ in range(size)
    }


def bench_kernels(repeat):
    rng = random.Random(0)
    a, b = random_terms(rng, 60), random_terms(rng, 60)
    mods = [("python", _kernels_py)]
    if kernels.compiled_available():
        mods.append(("cython", kernels.compiled_module()))
    else:
        print("compiled kernels not built; timing the Python backend only")
    cases = {
        "mul 60x60": lambda k: k.mul(a, b),
        "add_scaled": lambda k: k.add_scaled(a, 3, b, -7),
        "deriv": lambda k: k.deriv(a, kernels.WIDTH),
        "normalize": lambda k: k.normalize({key: v * 6 for key, v in a.items()}, 18),
    }
    print(f"{'kernel':<12}" + "".join(f"{name:>12}" for name, _ in mods) + ("     speedup" if len(mods) == 2 else ""))
    for label, fn in cases.items():
        row = []
        for _, mod in mods:
            row.append(min(timeit.repeat(lambda: fn(mod), number=200, repeat=repeat)) / 200 * 1e6)
        line = f"{label:<12}" + "".join(f"{t:>10.1f}us" for t in row)
        if len(row) == 2:
            line += f"{row[0] / row[1]:>11.1f}x"
        print(line)


def bench_end_to_end():
    print("\nend to end (seconds): backend, 23 compositions, 60 polynomial products")
    for flag in ("0", "1"):
        env = dict(os.environ, BUNDLESYM_PURE_PYTHON=flag)
        out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
        print("  " + out.stdout.strip())


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    bench_kernels(args.repeat)
    bench_end_to_end()


if __name__ == "__main__":
    main()
