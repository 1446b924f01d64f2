"""Kernel backend selection.

The compiled extension is used when importable; set the environment variable
``DIVISOR_MOMENTS_PURE=1`` to force the numpy fallback.  ``BACKEND`` names the
active choice and ``backends()`` exposes both for cross-checking.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _fallback

_compiled: ModuleType | None
try:
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("DIVISOR_MOMENTS_PURE"):
    _impl: ModuleType = _compiled
    BACKEND = "compiled"
else:
    _impl = _fallback
    BACKEND = "python"

iroot_array = _impl.iroot_array
hyperbola_counts = _impl.hyperbola_counts
sieve_counts = _impl.sieve_counts
sieve_weights = _impl.sieve_weights
neumaier_sum = _impl.neumaier_sum
compensated_cumsum = _impl.compensated_cumsum
cos_series = _impl.cos_series


def backends() -> dict[str, ModuleType]:
    """All importable backends keyed by name."""
    found = {"python": _fallback}
    if _compiled is not None:
        found["compiled"] = _compiled
    return found
