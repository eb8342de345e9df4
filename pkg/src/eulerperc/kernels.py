"""Backend selection for the hot loops.

The compiled extension is used when it imports; setting
``EULERPERC_BACKEND=python`` forces the numpy fallback.
"""
import os
from types import ModuleType

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module called ``name`` ("cython" or "python")."""
    if name is None:
        name = os.environ.get("EULERPERC_BACKEND", "cython" if _compiled else "python")
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; reinstall the package")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    return ["cython", "python"] if _compiled is not None else ["python"]


_active = get_backend()
BACKEND = "cython" if _active is _compiled else "python"

heat_bath_sweeps = _active.heat_bath_sweeps
sw_sweeps = _active.sw_sweeps
label_grid = _active.label_grid
