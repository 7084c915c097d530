import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bundlesym import _kernels_py, kernels

WIDTH = kernels.WIDTH

backends = [pytest.param(_kernels_py, id="python")]
if kernels.compiled_available():
    backends.append(pytest.param(kernels.compiled_module(), id="cython"))

keys = st.tuples(*[st.integers(0, 300)] * 3).map(
    lambda e: (e[0] << 2 * WIDTH) | (e[1] << WIDTH) | e[2]
)
big_ints = st.integers(-(10**30), 10**30)
term_maps = st.dictionaries(keys, big_ints.filter(bool), max_size=8)
small_maps = st.dictionaries(keys, st.integers(-(2**31) + 1, 2**31 - 1).filter(bool), max_size=12)


@pytest.mark.parametrize("k", backends)
class TestAgainstPython:
    """Each backend must agree with the reference kernels bit for bit."""

    @settings(max_examples=150, deadline=None)
    @given(term_maps, term_maps)
    def test_mul(self, k, a, b):
        assert k.mul(a, b) == _kernels_py.mul(a, b)

    @settings(max_examples=150, deadline=None)
    @given(term_maps, big_ints, term_maps, big_ints)
    def test_add_scaled(self, k, a, ca, b, cb):
        assert k.add_scaled(a, ca, b, cb) == _kernels_py.add_scaled(a, ca, b, cb)

    @settings(max_examples=100, deadline=None)
    @given(term_maps, big_ints)
    def test_scale(self, k, a, c):
        assert k.scale(a, c) == _kernels_py.scale(a, c)

    @settings(max_examples=100, deadline=None)
    @given(term_maps, st.sampled_from([0, WIDTH, 2 * WIDTH]))
    def test_deriv(self, k, a, shift):
        assert k.deriv(a, shift) == _kernels_py.deriv(a, shift)

    @settings(max_examples=100, deadline=None)
    @given(term_maps, st.integers(1, 10**12))
    def test_normalize(self, k, a, den):
        assert k.normalize(dict(a), den) == _kernels_py.normalize(dict(a), den)

    @settings(max_examples=150, deadline=None)
    @given(small_maps, small_maps)
    def test_mul_word_sized(self, k, a, b):
        assert k.mul(a, b) == _kernels_py.mul(a, b)

    def test_mul_accumulation_overflow(self, k):
        c = 2**31 - 1
        a = {i: c for i in range(4)}
        out = k.mul(a, a)
        assert out == _kernels_py.mul(a, a)
        assert out[3] == 4 * c * c

    def test_cancellation_drops_terms(self, k):
        assert k.mul({1: 1, 0: 1}, {1: 1, 0: -1}) == {2: 1, 0: -1}
        assert k.add_scaled({5: 2}, 1, {5: 1}, -2) == {}


def test_wide_polynomials_use_python_kernels():
    assert kernels.for_vars(kernels.COMPILED_MAX_VARS + 1) is _kernels_py


def test_env_forces_pure_python():
    env = dict(os.environ, BUNDLESYM_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import bundlesym; print(bundlesym.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_backends_give_identical_reports():
    code = (
        "import json; from bundlesym.harness.gen import GenConfig;"
        "from bundlesym.harness.suites import run_suite;"
        "r = run_suite('symbol-oracle', GenConfig(seed=3, trials=8)); print(json.dumps(r.to_json()))"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, BUNDLESYM_PURE_PYTHON=flag)
        proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        outs.append(proc.stdout)
    assert outs[0] == outs[1]
