"""Hot numeric kernels with selectable backend.

The numba backend is used by default; set ``MBVP_BACKEND=numpy`` to force
the pure-numpy fallback (or ``MBVP_BACKEND=numba`` to fail loudly when the
JIT is unavailable).  ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

_requested = os.environ.get("MBVP_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        "MBVP_BACKEND must be one of 'auto', 'numba', 'numpy'; got %r" % _requested
    )

if _requested == "numpy":
    from . import _numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import _numpy as _impl

        BACKEND = "numpy"

phi_forward = _impl.phi_forward
phi_backward = _impl.phi_backward
dphi_backward = _impl.dphi_backward
pair_defects = _impl.pair_defects
trapezoid_sq = _impl.trapezoid_sq
max_row_norm = _impl.max_row_norm

__all__ = [
    "BACKEND",
    "phi_forward",
    "phi_backward",
    "dphi_backward",
    "pair_defects",
    "trapezoid_sq",
    "max_row_norm",
]
