"""Kernel backend selection.

The compiled Cython module is used when it imports cleanly; otherwise the
pure-Python fallback is used. Set ``OPTODISTILL_PURE_PYTHON=1`` to force
the fallback (the benchmark and the backend-equivalence tests do this via
:func:`load_backend`).
"""
import importlib
import os

_FORCE_PURE = os.environ.get("OPTODISTILL_PURE_PYTHON", "") not in ("", "0")


def load_backend(name):
    """Import a kernel backend by name: ``"compiled"`` or ``"python"``."""
    if name == "compiled":
        return importlib.import_module("optodistill._kernels")
    if name == "python":
        return importlib.import_module("optodistill._kernels_py")
    raise ValueError(f"unknown kernel backend {name!r}")


if _FORCE_PURE:
    _impl = load_backend("python")
    BACKEND = "python"
else:
    try:
        _impl = load_backend("compiled")
        BACKEND = "compiled"
    except ImportError:
        _impl = load_backend("python")
        BACKEND = "python"

hermite_functions = _impl.hermite_functions
hermite_polys = _impl.hermite_polys
eq6_sums = _impl.eq6_sums
scatter_two_mode = _impl.scatter_two_mode

__all__ = [
    "BACKEND",
    "load_backend",
    "hermite_functions",
    "hermite_polys",
    "eq6_sums",
    "scatter_two_mode",
]
