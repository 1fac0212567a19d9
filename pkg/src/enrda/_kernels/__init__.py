"""Scaling-iteration kernels for entropic transport.

The alternating marginal-scaling loop dominates the runtime of every
assimilation cycle, so it exists in two interchangeable implementations: a
Cython extension (``_scaling``) and a vectorized NumPy fallback
(``numpy_backend``).  The compiled module is preferred when importable;
setting ``ENRDA_PURE_PYTHON=1`` forces the fallback.  Both expose

    scale_plain(kernel, row_marginal, col_marginal, tol, max_iter)
        -> (v, w, iterations, residual)

    scale_log(cost, log_row, log_col, gamma, tol, max_iter)
        -> (u, v, iterations, residual)

with identical semantics up to floating-point reassociation.
"""

import os

from . import numpy_backend

if os.environ.get("ENRDA_PURE_PYTHON"):
    _impl = numpy_backend
    BACKEND = "numpy"
else:
    try:
        from . import _scaling as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = numpy_backend
        BACKEND = "numpy"

scale_plain = _impl.scale_plain
scale_log = _impl.scale_log

__all__ = ["scale_plain", "scale_log", "BACKEND", "numpy_backend"]
