"""Backend selection for the polynomial kernels.

The compiled ``_ckernels`` extension is used when it imports and the
environment variable ``BUNDLESYM_PURE_PYTHON`` is unset or ``0``.  Keys with
more than ``COMPILED_MAX_VARS`` fields do not fit 64 bits and always go
through the Python kernels.
"""
import os

from . import _kernels_py

WIDTH = _kernels_py.WIDTH
MASK = _kernels_py.MASK
COMPILED_MAX_VARS = 63 // WIDTH

_compiled = None
if os.environ.get("BUNDLESYM_PURE_PYTHON", "0") in ("", "0"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def for_vars(m):
    """Kernel module to use for polynomials in ``m`` variables."""
    if _compiled is not None and m <= COMPILED_MAX_VARS:
        return _compiled
    return _kernels_py


def compiled_available():
    return _compiled is not None


def compiled_module():
    if _compiled is None:
        raise ImportError("bundlesym._ckernels is not built")
    return _compiled
