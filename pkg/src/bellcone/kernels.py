"""Kernel selection: compiled DD core when importable, pure Python otherwise.

Set ``BELLCONE_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import logging
import os

from . import _dd_py

log = logging.getLogger(__name__)

_INT64_SAFE = 1 << 40

try:
    if os.environ.get("BELLCONE_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ddcore
except ImportError:  # pragma: no cover - depends on the build
    _ddcore = None

BACKEND = "compiled" if _ddcore is not None else "python"


def dd_iterate(A, rays, done, order, eq, progress=False, backend=None):
    """Run the DD iteration on the best available backend.

    The compiled kernel works in checked int64; inputs with huge entries or an
    overflow during the run are handed to the Python kernel instead.
    """
    backend = backend or BACKEND
    if backend == "compiled" and _ddcore is not None:
        small = all(abs(v) < _INT64_SAFE for row in A for v in row) and \
            all(abs(v) < _INT64_SAFE for r in rays for v in r)
        if small:
            try:
                out = _ddcore.dd_iterate(A, rays, list(done), list(order), list(eq), progress)
                return [tuple(int(v) for v in row) for row in out.tolist()]
            except OverflowError:
                log.warning("int64 overflow in compiled DD kernel, rerunning in Python")
    return _dd_py.dd_iterate(A, rays, done, order, eq, progress)
