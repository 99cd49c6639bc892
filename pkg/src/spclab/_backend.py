"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; set
SPCLAB_FORCE_PURE=1 to force the NumPy fallback (used by the benchmark and
the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _purekernels

_force_pure = os.environ.get("SPCLAB_FORCE_PURE", "") not in ("", "0")

if not _force_pure:
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _purekernels
        BACKEND = "pure"
else:
    _impl = _purekernels
    BACKEND = "pure"

spc_replicates = _impl.spc_replicates
count_outside = _impl.count_outside


def backend_name() -> str:
    return BACKEND
