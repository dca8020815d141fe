"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-numpy
reference backend is the fallback.  Set QLDYN_BACKEND=python or
QLDYN_BACKEND=compiled to force a choice (forcing the compiled backend
raises if the extension is missing).
"""

import os

from .pack import (MODE_FTRL, MODE_QL, MODE_RD, MODE_RDH, make_nf_pack,
                   make_poly_pack)

_choice = os.environ.get("QLDYN_BACKEND", "").strip().lower()

if _choice in ("", "compiled", "c"):
    try:
        from . import _core as _impl
    except ImportError:
        if _choice:
            raise
        from . import pyref as _impl
elif _choice in ("python", "pyref", "numpy"):
    from . import pyref as _impl
else:
    raise ValueError(f"unrecognized QLDYN_BACKEND value: {_choice!r}")

backend_name = _impl.name
rewards_batch = _impl.rewards_batch
integrate_batch = _impl.integrate_batch

__all__ = [
    "MODE_FTRL", "MODE_QL", "MODE_RD", "MODE_RDH", "backend_name",
    "integrate_batch", "make_nf_pack", "make_poly_pack", "rewards_batch",
]
