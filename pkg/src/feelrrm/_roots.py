"""Bare bisection loop shared by the public root finder and the numpy kernels."""

from __future__ import annotations

from typing import Callable


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float,
           max_iter: int) -> tuple[float, int, float]:
    """Bisect a decreasing ``f`` with ``f(lo) > 0 > f(hi)``.

    Returns ``(x, iterations, f(x))``. Stops when ``|f(x)| <= tol`` or the
    bracket width drops to ``tol``.
    """
    x, fx = lo, f(lo)
    it = 0
    while it < max_iter:
        it += 1
        x = 0.5 * (lo + hi)
        fx = f(x)
        if fx > 0.0:
            lo = x
        else:
            hi = x
        if abs(fx) <= tol or hi - lo <= tol:
            break
    return x, it, fx
