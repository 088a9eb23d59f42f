"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise the
NumPy fallback is used. ``PRGBM_BACKEND=compiled|numpy`` forces the choice
(raising if the compiled extension was requested but is unavailable).
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    from . import _splitkern
except ImportError:
    _splitkern = None


def _select():
    requested = os.environ.get("PRGBM_BACKEND", "").strip().lower()
    if requested in ("", "auto"):
        return _splitkern if _splitkern is not None else _pykernels
    if requested == "numpy":
        return _pykernels
    if requested == "compiled":
        if _splitkern is None:
            raise ImportError(
                "PRGBM_BACKEND=compiled but the prgbm._splitkern extension "
                "is not built; reinstall with a C compiler available")
        return _splitkern
    raise ValueError(f"unknown PRGBM_BACKEND value {requested!r}; "
                     "use 'compiled', 'numpy', or 'auto'")


_active = _select()

backend_name: str = _active.BACKEND_NAME
compiled_available: bool = _splitkern is not None

best_split_deterministic = _active.best_split_deterministic
score_random_splits = _active.score_random_splits
uniform_split_scores = _active.uniform_split_scores
node_stats = _active.node_stats
feature_ranges = _active.feature_ranges
partition = _active.partition
predict_nodes = _active.predict_nodes
