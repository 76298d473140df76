"""Hot kernels: compiled extension when available, numpy fallback otherwise.

Set ``VRFW_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

if os.environ.get("VRFW_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _ext as _impl
    except ImportError:  # extension not built
        _impl = _fallback

BACKEND = _impl.BACKEND
logistic_values = _impl.logistic_values
logistic_batch_gradient = _impl.logistic_batch_gradient
top_singular = _impl.top_singular

__all__ = ["BACKEND", "logistic_values", "logistic_batch_gradient", "top_singular"]
