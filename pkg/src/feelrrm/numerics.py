"""Special functions and scalar root finding."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import backend
from ._roots import bisect
from .errors import BracketError, DomainError

BRANCH_POINT = -1.0 / math.e
MAX_BRACKET_DOUBLINGS = 200


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    tol: float = 1e-10

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if not self.tol > 0:
            raise BracketError(f"tol must be positive, got {self.tol}")


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function.

    Halley iteration from a piecewise start (branch-point series near -1/e,
    log asymptotics for large arguments).

    Raises
    ------
    DomainError
        If ``x < -1/e``.
    """
    w = float(backend.kernels.lambertw0(np.array([x], dtype=np.float64))[0])
    if math.isnan(w):
        raise DomainError(f"lambert_w0 undefined for x={x!r} < -1/e")
    return w


def lambert_w0_array(x) -> np.ndarray:
    """Vectorised :func:`lambert_w0`; raises if any entry is below -1/e."""
    w = backend.kernels.lambertw0(x)
    bad = np.isnan(w) & ~np.isnan(np.asarray(x, dtype=np.float64))
    if np.any(bad):
        raise DomainError("lambert_w0 undefined below -1/e")
    return w


def bisect_decreasing(f: Callable[[float], float], bracket: RootBracket,
                      max_iter: int = 500, expand: bool = True) -> float:
    """Root of a continuous, strictly decreasing ``f`` inside ``bracket``.

    If ``f(hi) > 0`` and ``expand`` is set, the bracket is widened by doubling
    its width (at most 200 times) until the sign changes.
    """
    lo, hi, tol = bracket.lo, bracket.hi, bracket.tol
    flo = f(lo)
    if flo <= 0.0:
        if flo == 0.0:
            return lo
        raise BracketError(f"f(lo)={flo!r} is not positive at lo={lo!r}")
    fhi = f(hi)
    width = hi - lo
    doublings = 0
    while fhi > 0.0 and expand and doublings < MAX_BRACKET_DOUBLINGS:
        lo, width = hi, 2.0 * width
        hi = lo + width
        fhi = f(hi)
        doublings += 1
    if fhi > 0.0:
        raise BracketError(f"no sign change on [{bracket.lo!r}, {hi!r}]")
    if fhi == 0.0:
        return hi
    x, _, _ = bisect(f, lo, hi, tol, max_iter)
    return x
