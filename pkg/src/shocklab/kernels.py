"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set ``SHOCKLAB_FORCE_PYTHON=1`` to force the pure-python fallback (used by
the equivalence tests and the benchmark).
"""

from __future__ import annotations

import os
import warnings

if os.environ.get("SHOCKLAB_FORCE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on build
        from . import _kernels_py as _impl

        warnings.warn(
            "shocklab compiled kernels unavailable; using the pure-python "
            "fallback (long runs will be slow)",
            RuntimeWarning,
            stacklevel=2,
        )

BACKEND = _impl.BACKEND
advance_periodic = _impl.advance_periodic
advance_coupled = _impl.advance_coupled
