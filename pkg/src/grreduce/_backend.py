"""Select the compiled kernels when available, else the numpy fallback.

Set ``GRREDUCE_PURE=1`` to force the fallback.
"""
import os

from . import _fallback

NAME = "python"
kernels = _fallback

if not os.environ.get("GRREDUCE_PURE"):
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        NAME = "cython"
    except ImportError:
        pass


def available() -> dict:
    """All importable kernel implementations, keyed by name."""
    out = {"python": _fallback}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out


chart_moments = kernels.chart_moments
chart_moments_batch = kernels.chart_moments_batch
chart_jacobian = kernels.chart_jacobian
newton_moduli = kernels.newton_moduli
