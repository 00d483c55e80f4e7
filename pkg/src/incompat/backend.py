"""Backend selection: compiled jet kernels when available, numpy otherwise.

Set INCOMPAT_PURE_PYTHON=1 to force the pure-numpy backend even when the
compiled extension was built.
"""

from __future__ import annotations

import os

if os.environ.get("INCOMPAT_PURE_PYTHON", "0") == "1":
    from . import _jetcore_py as _impl
else:
    try:
        from . import _jetcore as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _jetcore_py as _impl

BACKEND_NAME: str = _impl.BACKEND_NAME
mul_coeffs = _impl.mul_coeffs


def thread_count() -> int:
    """Worker cap for embarrassingly parallel loops (INCOMPAT_THREADS)."""
    raw = os.environ.get("INCOMPAT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
