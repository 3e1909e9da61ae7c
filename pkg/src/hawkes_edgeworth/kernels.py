"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the pure-Python
twin. Set ``HAWKES_EDGEWORTH_PURE=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("HAWKES_EDGEWORTH_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

thin_chunk = _impl.thin_chunk
core_sums = _impl.core_sums
loglik_value = _impl.loglik_value
loglik_derivs = _impl.loglik_derivs
third_sums = _impl.third_sums

__all__ = [
    "BACKEND",
    "thin_chunk",
    "core_sums",
    "loglik_value",
    "loglik_derivs",
    "third_sums",
]
