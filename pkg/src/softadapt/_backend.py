"""Weight-kernel backend selection.

The compiled extension is preferred when built; otherwise the pure-Python
kernel is used.  Set SOFTADAPT_BACKEND=pure or SOFTADAPT_BACKEND=compiled
to force a choice, or pass an explicit name to the entry points that
accept one.
"""

from __future__ import annotations

import os
from typing import Callable

import numpy as np

from . import _kernel_py

try:
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

WeightKernel = Callable[[np.ndarray, float, float, int, bool, bool], np.ndarray]

_KERNELS: dict[str, WeightKernel] = {"pure": _kernel_py.weights_from_window}
if _compiled is not None:
    _KERNELS["compiled"] = _compiled.weights_from_window


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_KERNELS))


def resolve_backend(name: str = "auto") -> str:
    """Map a backend name (including "auto") to a concrete backend."""
    if name == "auto":
        name = os.environ.get("SOFTADAPT_BACKEND", "").strip() or "auto"
    if name == "auto":
        name = "compiled" if "compiled" in _KERNELS else "pure"
    if name not in _KERNELS:
        raise ValueError(
            f"unknown or unavailable backend {name!r}; available: {available_backends()}"
        )
    return name


def get_kernel(name: str = "auto") -> WeightKernel:
    """The weight-kernel callable for a backend name."""
    return _KERNELS[resolve_backend(name)]


def active_backend() -> str:
    """Name of the backend "auto" currently resolves to."""
    return resolve_backend("auto")
