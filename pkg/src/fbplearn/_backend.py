"""Selects the projector kernel backend at import time.

The compiled extension is preferred; the pure-numpy fallback is used when
the extension is missing or ``FBPLEARN_PURE_PYTHON`` is set to a non-empty
value other than ``0``. Both backends implement identical arithmetic.
"""

from __future__ import annotations

import os

_force_python = os.environ.get("FBPLEARN_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    from . import _kernels_py as kernels

    USING_EXTENSION = False
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        USING_EXTENSION = True
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        USING_EXTENSION = False

_num_threads = 1


def set_num_threads(n: int) -> None:
    """Cap thread use of the compiled kernels (no-op for the numpy fallback)."""
    global _num_threads
    if n < 1:
        raise ValueError(f"thread count must be >= 1, got {n}")
    _num_threads = n


def get_num_threads() -> int:
    return _num_threads
