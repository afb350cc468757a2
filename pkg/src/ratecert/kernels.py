"""Kernel selection: compiled extension when available, NumPy fallback otherwise.

Set RATECERT_PURE_PYTHON=1 to force the fallback (used by the benchmark and
for debugging).
"""

from __future__ import annotations

import os

if os.environ.get("RATECERT_PURE_PYTHON") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

USING_NATIVE: bool = bool(_impl.IS_NATIVE)

eval_field = _impl.eval_field
rk23_integrate = _impl.rk23_integrate

DONE = _impl.DONE
STOPPED = _impl.STOPPED
UNDERFLOW = _impl.UNDERFLOW
MAX_STEPS = _impl.MAX_STEPS
