"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python kernels when
the extension is missing or MATCHDIFF_PURE is set to a non-empty value
other than "0".
"""

from __future__ import annotations

import os

from . import _kernels_py as pure

_force_pure = os.environ.get("MATCHDIFF_PURE", "") not in ("", "0")

if _force_pure:
    _impl = pure
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND: str = _impl.BACKEND

match_poly_counts = _impl.match_poly_counts
match_upto_counts = _impl.match_upto_counts
cycle_census_counts = _impl.cycle_census_counts
