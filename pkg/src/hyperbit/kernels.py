"""Hot-kernel dispatch: the compiled extension when built, numpy otherwise.

Set ``HYPERBIT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("HYPERBIT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _fallback

BACKEND = "python" if _impl is _fallback else "compiled"

mc_weights = _impl.mc_weights
mc_pw = _impl.mc_pw
gap_grid = _impl.gap_grid
simplex_grid_search = _impl.simplex_grid_search
