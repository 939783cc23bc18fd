"""Pick the compiled kernels when they are built, else the pure-Python ones.

Set ``ATOMOPT_BACKEND=python`` to force the fallback. ``use()`` swaps the
active backend at runtime (benchmarks and cross-backend tests rely on it).
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

kernels = _pykernels


def use(name):
    """Activate backend ``name`` ("cython" or "python") and return its module."""
    global kernels
    try:
        kernels = BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
    return kernels


def active():
    return kernels.NAME


_requested = os.environ.get("ATOMOPT_BACKEND", "").strip().lower()
if _requested:
    use(_requested)
elif _ckernels is not None:
    kernels = _ckernels
