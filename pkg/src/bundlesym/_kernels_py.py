"""Pure-Python polynomial kernels.

A polynomial is held as ``(terms, den)`` where ``terms`` maps a packed
monomial key to an integer numerator and ``den`` is a positive common
denominator.  Packed keys store one exponent per ``WIDTH``-bit field with
``x1`` in the most significant field, so integer order on keys is lex order
on exponent tuples and monomial multiplication is integer addition.

This module mirrors ``_ckernels`` function by function.
"""
from math import gcd

WIDTH = 16
MASK = (1 << WIDTH) - 1


def mul(a, b):
    """Convolution of two term maps (numerators only)."""
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    items_b = list(b.items())
    for ka, va in a.items():
        for kb, vb in items_b:
            k = ka + kb
            out[k] = get(k, 0) + va * vb
    return {k: v for k, v in out.items() if v}


def add_scaled(a, ca, b, cb):
    """Return ``ca*a + cb*b`` with zero terms removed."""
    out = {k: v * ca for k, v in a.items()}
    get = out.get
    for k, v in b.items():
        out[k] = get(k, 0) + v * cb
    return {k: v for k, v in out.items() if v}


def scale(a, c):
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


def deriv(a, shift):
    """Formal partial derivative along the field starting at bit ``shift``."""
    out = {}
    step = 1 << shift
    for k, v in a.items():
        e = (k >> shift) & MASK
        if e:
            out[k - step] = v * e
    return out


def normalize(a, den):
    """Divide numerators and denominator by their common content."""
    if not a:
        return {}, 1
    g = den
    for v in a.values():
        g = gcd(g, v)
        if g == 1:
            return a, den
    return {k: v // g for k, v in a.items()}, den // g
