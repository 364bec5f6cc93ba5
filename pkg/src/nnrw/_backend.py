"""Selects the feature-map kernel implementation at import time.

Prefers the compiled Cython extension; falls back to the numpy version
when the extension is missing or when NNRW_PURE_PYTHON=1 is set.  Both
implement the same `feature_map` contract and agree to within float
rounding (the compiled kernel uses libm's exp, numpy its own).
"""

import os

if os.environ.get("NNRW_PURE_PYTHON", "") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

feature_map = _impl.feature_map
SUPPORTED_IDS = _impl.SUPPORTED_IDS
KERNEL_BACKEND = _impl.BACKEND
