"""Grid stencil kernels with a compiled core and a numpy fallback.

The compiled extension is used when it imports; ``BICONSERVE_KERNELS=python``
forces the fallback.  ``BACKEND`` names the active implementation and
``get_backend(name)`` returns either one explicitly (for comparisons).
"""

import os

from . import _fallback

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _fallback}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels


def available_backends():
    return sorted(_BACKENDS)


def get_backend(name):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} not available; have {available_backends()}") from None


_requested = os.environ.get("BICONSERVE_KERNELS", "").strip().lower()
if _requested:
    _active = get_backend(_requested)
else:
    _active = _ckernels if _ckernels is not None else _fallback
BACKEND = "cython" if _active is _ckernels else "python"

christoffels = _active.christoffels
gauss_curvature = _active.gauss_curvature
brioschi = _active.brioschi
laplace_beltrami = _active.laplace_beltrami
grad_norm_sq = _active.grad_norm_sq
