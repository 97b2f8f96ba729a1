"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``CORECUT_PURE_PYTHON`` is set to a non-empty value, the
numpy fallback is used. ``BACKEND`` names the active choice.
"""
import os

from corecut import _kernels_py as python_backend

try:
    if os.environ.get("CORECUT_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from corecut import _kernels as compiled_backend
except ImportError:
    compiled_backend = None

_active = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "compiled" if compiled_backend is not None else "python"

scaled_matvec = _active.scaled_matvec
sweep_cuts = _active.sweep_cuts
bridge_forest = _active.bridge_forest
subset_cut_volume = _active.subset_cut_volume

__all__ = [
    "BACKEND",
    "bridge_forest",
    "compiled_backend",
    "python_backend",
    "scaled_matvec",
    "subset_cut_volume",
    "sweep_cuts",
]
