# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled polynomial kernels; same contract as ``_kernels_py``.

Keys must fit a signed 64-bit integer (at most three 16-bit fields); the
dispatcher in ``kernels`` routes wider polynomials to the Python twin.
"""
from libc.stdlib cimport malloc, free, qsort
from math import gcd

DEF WIDTH = 16
DEF MASK = 0xFFFF
# coefficients below this bound multiply without overflowing 64 bits
DEF SMALL = 1 << 31

cdef extern from *:
    bint add_overflow "__builtin_saddll_overflow"(long long a, long long b, long long *res) nogil


cdef struct Term:
    long long key
    long long coeff


cdef int _cmp_terms(const void *x, const void *y) noexcept nogil:
    cdef long long a = (<Term *> x).key
    cdef long long b = (<Term *> y).key
    return (a > b) - (a < b)


cdef bint _load_small(dict d, long long *keys, long long *vals):
    cdef Py_ssize_t i = 0
    cdef object k, v
    for k, v in d.items():
        if not -SMALL < v < SMALL:
            return False
        keys[i] = k
        vals[i] = v
        i += 1
    return True


cdef object _mul_small(dict a, dict b):
    """Machine-word product; returns None when a coefficient or sum is too big."""
    cdef Py_ssize_t na = len(a), nb = len(b), i, j, t, total = na * nb
    cdef long long *buf = <long long *> malloc((2 * na + 2 * nb) * sizeof(long long))
    cdef Term *terms = <Term *> malloc(total * sizeof(Term))
    cdef long long acc, cur
    cdef dict out = {}
    if buf == NULL or terms == NULL:
        free(buf)
        free(terms)
        raise MemoryError()
    try:
        if not (_load_small(a, buf, buf + na) and _load_small(b, buf + 2 * na, buf + 2 * na + nb)):
            return None
        t = 0
        for i in range(na):
            for j in range(nb):
                terms[t].key = buf[i] + buf[2 * na + j]
                terms[t].coeff = buf[na + i] * buf[2 * na + nb + j]
                t += 1
        qsort(terms, total, sizeof(Term), _cmp_terms)
        t = 0
        while t < total:
            cur = terms[t].key
            acc = terms[t].coeff
            t += 1
            while t < total and terms[t].key == cur:
                if add_overflow(acc, terms[t].coeff, &acc):
                    return None
                t += 1
            if acc:
                out[cur] = acc
        return out
    finally:
        free(buf)
        free(terms)


def mul(dict a, dict b):
    cdef Py_ssize_t nb, j
    cdef long long ka, k
    cdef long long *kbs
    cdef dict out = {}
    cdef object va, key, old, fast
    cdef list vbs
    if len(a) < len(b):
        a, b = b, a
    nb = len(b)
    if nb == 0:
        return out
    fast = _mul_small(a, b)
    if fast is not None:
        return fast
    kbs = <long long *> malloc(nb * sizeof(long long))
    if kbs == NULL:
        raise MemoryError()
    try:
        vbs = []
        j = 0
        for key, old in b.items():
            kbs[j] = key
            vbs.append(old)
            j += 1
        for key, va in a.items():
            ka = key
            for j in range(nb):
                k = ka + kbs[j]
                old = out.get(k)
                if old is None:
                    out[k] = va * vbs[j]
                else:
                    out[k] = old + va * vbs[j]
    finally:
        free(kbs)
    return {kk: vv for kk, vv in out.items() if vv}


def add_scaled(dict a, object ca, dict b, object cb):
    cdef dict out = {}
    cdef object k, v, old
    for k, v in a.items():
        out[k] = v * ca
    for k, v in b.items():
        old = out.get(k)
        if old is None:
            out[k] = v * cb
        else:
            out[k] = old + v * cb
    return {kk: vv for kk, vv in out.items() if vv}


def scale(dict a, object c):
    if not c:
        return {}
    return {kk: vv * c for kk, vv in a.items()}


def deriv(dict a, int shift):
    cdef dict out = {}
    cdef long long k, step = 1LL << shift
    cdef long long e
    cdef object key, v
    for key, v in a.items():
        k = key
        e = (k >> shift) & MASK
        if e:
            out[k - step] = v * e
    return out


def normalize(dict a, object den):
    cdef object g = den
    cdef object v
    if not a:
        return {}, 1
    for v in a.values():
        g = gcd(g, v)
        if g == 1:
            return a, den
    return {kk: vv // g for kk, vv in a.items()}, den // g
