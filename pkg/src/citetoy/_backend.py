"""Kernel backend selection.

``CITETOY_BACKEND=numpy`` forces the vectorised NumPy kernels; the default is
``numba`` whenever numba imports and JIT is not globally disabled.
"""
import os

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _resolve():
    requested = os.environ.get("CITETOY_BACKEND", "").strip().lower()
    if requested not in ("", "numba", "numpy"):
        raise ValueError(f"CITETOY_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    jit_off = os.environ.get("NUMBA_DISABLE_JIT", "0") not in ("", "0")
    if requested == "numpy" or not HAVE_NUMBA or jit_off:
        return "numpy"
    return "numba"


BACKEND = _resolve()
