"""Import-time selection between the compiled and pure numpy hot kernels.

The compiled extension is preferred when it built successfully; setting the
environment variable ``KCOLORLAB_PURE=1`` forces the numpy fallback, which
is useful for debugging and for the backend-comparison benchmark.  Either
way the public surface is the same five functions.
"""

from __future__ import annotations

import os

if os.environ.get("KCOLORLAB_PURE") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND
sum_xlogx = _impl.sum_xlogx
norm_sq = _impl.norm_sq
rotation_scores = _impl.rotation_scores
line_f_values = _impl.line_f_values
sinkhorn_balance = _impl.sinkhorn_balance

__all__ = [
    "BACKEND",
    "sum_xlogx",
    "norm_sq",
    "rotation_scores",
    "line_f_values",
    "sinkhorn_balance",
]
