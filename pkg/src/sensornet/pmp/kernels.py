"""Backend selection for the limb kernels.

``SENSORNET_DISABLE_NUMBA=1`` in the environment (read at import time)
selects the vectorised numpy path; otherwise the numba-compiled loops are
used.  :func:`get_backend` returns either one explicitly, which is what
the tests and the benchmark do.
"""
from types import ModuleType

from . import _vector
from ._jit import NUMBA_AVAILABLE, USE_NUMBA

BACKENDS = ("numba", "numpy") if NUMBA_AVAILABLE else ("numpy",)
DEFAULT_BACKEND = "numba" if USE_NUMBA else "numpy"


def get_backend(name: str | None = None) -> ModuleType:
    name = name or DEFAULT_BACKEND
    if name == "numpy":
        return _vector
    if name == "numba":
        if not NUMBA_AVAILABLE:
            raise RuntimeError("numba is not installed")
        from . import _loops
        return _loops
    raise ValueError(f"unknown backend {name!r}")
