"""Kernel backend selection.

``RRM_BACKEND=numba`` (default) uses the compiled kernels, ``RRM_BACKEND=numpy``
the vectorised fallback. If numba cannot be imported the numpy path is used.
The active set can also be swapped at runtime with :func:`use`.
"""

from __future__ import annotations

import contextlib
import logging
import os
from types import ModuleType, SimpleNamespace
from typing import Iterator

from . import _np_kernels

log = logging.getLogger(__name__)

KERNEL_NAMES = ("lambertw0", "wp1_log", "gamma_at", "dual_bisect")


def _load(name: str):
    if name == "numpy":
        return _np_kernels
    if name == "numba":
        from . import _nb_kernels

        return _nb_kernels
    raise ValueError(f"unknown backend {name!r} (expected 'numba' or 'numpy')")


def _initial():
    requested = os.environ.get("RRM_BACKEND", "numba").strip().lower() or "numba"
    try:
        return requested, _load(requested)
    except ImportError:
        log.warning("numba unavailable, falling back to numpy kernels")
        return "numpy", _np_kernels


name, kernels = _initial()


def get(backend: str) -> ModuleType:
    """Return the kernel module for ``backend`` without activating it."""
    return _load(backend)


@contextlib.contextmanager
def use(backend: str | ModuleType | SimpleNamespace) -> Iterator[None]:
    """Temporarily route every solver through another kernel set."""
    global name, kernels
    old = name, kernels
    if isinstance(backend, str):
        name, kernels = backend, _load(backend)
    else:
        name, kernels = getattr(backend, "__name__", "custom"), backend
    try:
        yield
    finally:
        name, kernels = old
