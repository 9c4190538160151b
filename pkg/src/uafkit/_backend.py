"""Kernel backend selection.

Prefers the compiled Cython kernels and falls back to the pure-NumPy
implementation when the extension is unavailable. The ``UAFKIT_BACKEND``
environment variable forces a choice: ``cython`` (error if not built),
``numpy``, or unset/empty for auto-detection.
"""

from __future__ import annotations

import os

_requested = os.environ.get("UAFKIT_BACKEND", "").strip().lower()

if _requested == "numpy":
    from . import _kernels_np as kernels
elif _requested == "cython":
    try:
        from . import _kernels_cy as kernels  # type: ignore[no-redef]
    except ImportError as exc:
        raise ImportError(
            "UAFKIT_BACKEND=cython but the compiled extension is not "
            "available; build it (pip install -e . --no-build-isolation) "
            "or unset UAFKIT_BACKEND"
        ) from exc
elif _requested == "":
    try:
        from . import _kernels_cy as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_np as kernels  # type: ignore[no-redef]
else:
    raise ImportError(
        f"invalid UAFKIT_BACKEND={_requested!r}: expected 'cython', 'numpy', "
        "or unset"
    )


def backend_name() -> str:
    """Name of the active kernel backend: 'cython' or 'numpy'."""
    return kernels.BACKEND_NAME


uaf_eval = kernels.uaf_eval
uaf_grad = kernels.uaf_grad
