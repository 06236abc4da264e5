"""Kernel backend selection.

The compiled extension is used when it imports; setting the environment
variable ``MACFUSION_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("MACFUSION_PURE_PYTHON", "").strip() not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"

barrier_eval = _impl.barrier_eval
barrier_value = _impl.barrier_value
newton_center = _impl.newton_center
feasible_l2 = _impl.feasible_l2
min_p2_l2 = _impl.min_p2_l2
uncoded_mse_l2 = _impl.uncoded_mse_l2


def backends():
    """Mapping of available backend name to kernel module."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
