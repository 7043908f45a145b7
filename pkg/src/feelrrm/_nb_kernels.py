"""Numba-compiled hot kernels (default backend).

Scalar loops mirroring ``_np_kernels``; the dual bisection runs entirely in
compiled code.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ._np_kernels import (
    BRANCH_COEFFS,
    HALLEY_MAX_ITER,
    INV_E_HI,
    INV_E_LO,
    LOG_FORM_T,
    SERIES_P2_MAX,
)

E = math.e
_COEFFS = np.array(BRANCH_COEFFS)


@njit(cache=True)
def _branch_series_wp1(p2):
    sigma = math.sqrt(p2)
    acc = 0.0
    for i in range(_COEFFS.size - 1, -1, -1):
        acc = acc * sigma + _COEFFS[i]
    return acc * sigma


@njit(cache=True)
def _w0_core(x, p2):
    if p2 < 0.0 or math.isnan(x):
        return math.nan
    if x == 0.0:
        return 0.0
    if p2 < SERIES_P2_MAX:
        return _branch_series_wp1(p2) - 1.0
    if x < -0.25:
        w = _branch_series_wp1(p2) - 1.0
    elif x < 3.0:
        l1 = math.log1p(x)
        w = l1 * (1.0 - math.log1p(l1) / (2.0 + l1))
    else:
        lb = math.log(x)
        llb = math.log(lb)
        w = lb - llb + llb / lb
    for _ in range(HALLEY_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if abs(dw) <= 4e-16 * (1.0 + abs(w)):
            break
    return w


@njit(cache=True)
def _w0_scalar(x):
    p2 = 2.0 * E * ((x + INV_E_HI) + INV_E_LO)
    if p2 < 0.0 and x >= -INV_E_HI:
        p2 = 0.0
    return _w0_core(x, p2)


@njit(cache=True)
def _wp1_log_scalar(t):
    if t > LOG_FORM_T:
        lz = t - 1.0
        w = lz - math.log(lz)
        for _ in range(8):
            w = w - (w + math.log(w) - lz) / (1.0 + 1.0 / w)
        return 1.0 + w
    p2 = 2.0 * math.exp(t)
    if p2 < SERIES_P2_MAX:
        return _branch_series_wp1(p2)
    return _w0_core(math.expm1(t) / E, p2) + 1.0


@njit(cache=True)
def _lambertw0_flat(x):
    out = np.empty(x.size)
    for i in range(x.size):
        out[i] = _w0_scalar(x[i])
    return out


def lambertw0(x) -> np.ndarray:
    """Principal-branch Lambert W; NaN below -1/e."""
    x = np.asarray(x, dtype=np.float64)
    return _lambertw0_flat(np.ascontiguousarray(x).ravel()).reshape(x.shape)


@njit(cache=True)
def _wp1_log_flat(t):
    out = np.empty(t.size)
    for i in range(t.size):
        out[i] = _wp1_log_scalar(t[i])
    return out


def wp1_log(t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    return _wp1_log_flat(np.ascontiguousarray(t).ravel()).reshape(t.shape)


@njit(cache=True)
def _gamma_at(s, a, c):
    out = np.empty(a.size)
    for k in range(a.size):
        out[k] = a[k] / _wp1_log_scalar(s + c[k])
    return out


def gamma_at(s: float, a: np.ndarray, c: np.ndarray) -> np.ndarray:
    return _gamma_at(float(s), np.ascontiguousarray(a, dtype=np.float64),
                     np.ascontiguousarray(c, dtype=np.float64))


@njit(cache=True)
def _excess(s, a, c):
    acc = 0.0
    for k in range(a.size):
        acc += a[k] / _wp1_log_scalar(s + c[k])
    return acc - 1.0


@njit(cache=True)
def _dual_bisect(a, c, lo, hi, tol, max_iter):
    x = lo
    fx = _excess(lo, a, c)
    it = 0
    while it < max_iter:
        it += 1
        x = 0.5 * (lo + hi)
        fx = _excess(x, a, c)
        if fx > 0.0:
            lo = x
        else:
            hi = x
        if abs(fx) <= tol or hi - lo <= tol:
            break
    return x, it, fx


def dual_bisect(a: np.ndarray, c: np.ndarray, lo: float, hi: float, tol: float,
                max_iter: int) -> tuple[float, int, float]:
    s, it, fx = _dual_bisect(np.ascontiguousarray(a, dtype=np.float64),
                             np.ascontiguousarray(c, dtype=np.float64),
                             float(lo), float(hi), float(tol), int(max_iter))
    return float(s), int(it), float(fx)
