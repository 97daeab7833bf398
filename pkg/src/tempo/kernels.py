"""Selects the interval-set kernel backend at import time.

The compiled ``_ckernels`` extension is used when it was built; otherwise, or
when ``TEMPO_PURE_PYTHON=1`` is set, the ``_pykernels`` module is used.
"""

import os

from . import _pykernels

python_backend = _pykernels

if os.environ.get("TEMPO_PURE_PYTHON", "") not in ("", "0"):
    compiled_backend = None
else:
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if backend is compiled_backend else "python"

iv_intersect = backend.iv_intersect
iv_add = backend.iv_add
iv_sub = backend.iv_sub
coalesce = backend.coalesce
union = backend.union
intersect = backend.intersect
covers = backend.covers
contains_point = backend.contains_point
subset = backend.subset
dilate_add = backend.dilate_add
dilate_sub = backend.dilate_sub
erode_future = backend.erode_future
erode_past = backend.erode_past
until = backend.until
since = backend.since
