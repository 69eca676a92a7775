"""Backend dispatch: re-exports the kernel set chosen by ``CITETOY_BACKEND``."""
from ._backend import BACKEND

if BACKEND == "numba":
    from . import _kernels_numba as _impl
else:
    from . import _kernels_numpy as _impl

CAP = _impl.CAP

cauchy = _impl.cauchy
series_exp = _impl.series_exp
series_log = _impl.series_log
series_pow = _impl.series_pow
series_reciprocal = _impl.series_reciprocal

derive_many = _impl.derive_many
bulk_geometric = _impl.bulk_geometric
bulk_citations = _impl.bulk_citations
bulk_author = _impl.bulk_author
bulk_field = _impl.bulk_field
bulk_elite = _impl.bulk_elite
bulk_mixed_truncated_geometric = _impl.bulk_mixed_truncated_geometric


def load(name):
    """Return the kernel module for ``name`` ('numba' or 'numpy'), ignoring the env flag."""
    if name == "numba":
        from . import _kernels_numba as mod
    elif name == "numpy":
        from . import _kernels_numpy as mod
    else:
        raise ValueError(f"unknown backend {name!r}")
    return mod
