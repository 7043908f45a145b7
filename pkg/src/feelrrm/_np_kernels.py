"""Pure-numpy implementations of the hot kernels.

Same algorithms as ``_nb_kernels``, vectorised over devices instead of
compiled. Selected with ``RRM_BACKEND=numpy``.
"""

from __future__ import annotations

import numpy as np

from ._roots import bisect

E = np.e
# -1/e split into a double and its rounding remainder
INV_E_HI = 0.36787944117144233
INV_E_LO = -1.2428753672788363e-17

# W0 around the branch point in powers of sqrt(2(1 + e x)), starting at the
# linear term; the constant term is -1.
BRANCH_COEFFS = (
    1.0,
    -1.0 / 3.0,
    11.0 / 72.0,
    -43.0 / 540.0,
    769.0 / 17280.0,
    -221.0 / 8505.0,
    680863.0 / 43545600.0,
    -1963.0 / 204120.0,
    226287557.0 / 37623398400.0,
)
SERIES_P2_MAX = 1e-4  # sigma < 1e-2: truncation error far below eps
HALLEY_MAX_ITER = 24
LOG_FORM_T = 700.0


def _branch_series_wp1(p2: np.ndarray) -> np.ndarray:
    """1 + W0 from the branch-point series, given p2 = 2(1 + e x)."""
    sigma = np.sqrt(p2)
    acc = np.zeros_like(sigma)
    for coef in reversed(BRANCH_COEFFS):
        acc = acc * sigma + coef
    return acc * sigma


def _halley(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    active = np.ones(x.shape, dtype=bool)
    for _ in range(HALLEY_MAX_ITER):
        if not active.any():
            break
        xa, wa = x[active], w[active]
        ew = np.exp(wa)
        f = wa * ew - xa
        wp1 = wa + 1.0
        dw = f / (ew * wp1 - (wa + 2.0) * f / (2.0 * wp1))
        wa = wa - dw
        w[active] = wa
        idx = np.flatnonzero(active)
        done = np.abs(dw) <= 4e-16 * (1.0 + np.abs(wa))
        active[idx[done]] = False
    return w


def _w0_core(x: np.ndarray, p2: np.ndarray) -> np.ndarray:
    w = np.full(x.shape, np.nan)
    valid = p2 >= 0.0
    series = valid & (p2 < SERIES_P2_MAX)
    w[series] = _branch_series_wp1(p2[series]) - 1.0

    rest = valid & ~series
    near = rest & (x < -0.25)
    mid = rest & (x >= -0.25) & (x < 3.0)
    big = rest & (x >= 3.0)

    guess = np.empty(x.shape)
    guess[near] = _branch_series_wp1(p2[near]) - 1.0
    l1 = np.log1p(x[mid])
    guess[mid] = l1 * (1.0 - np.log1p(l1) / (2.0 + l1))
    lb = np.log(x[big])
    llb = np.log(lb)
    guess[big] = lb - llb + llb / lb

    w[rest] = _halley(x[rest], guess[rest])
    zero = x == 0.0
    w[zero] = 0.0
    return w


def lambertw0(x) -> np.ndarray:
    """Principal-branch Lambert W; NaN below -1/e."""
    x = np.asarray(x, dtype=np.float64)
    flat = np.atleast_1d(x).ravel()
    p2 = 2.0 * E * ((flat + INV_E_HI) + INV_E_LO)
    # the float closest to -1/e maps onto the branch point
    p2 = np.where((p2 < 0.0) & (flat >= -INV_E_HI), 0.0, p2)
    return _w0_core(flat, p2).reshape(x.shape)


def wp1_log(t) -> np.ndarray:
    """``1 + W0((exp(t) - 1) / e)``, accurate near the branch point (t -> -inf)
    and for arguments whose exponential overflows."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty(t.shape)
    huge = t > LOG_FORM_T
    if huge.any():
        lz = t[huge] - 1.0
        w = lz - np.log(lz)
        for _ in range(8):
            w = w - (w + np.log(w) - lz) / (1.0 + 1.0 / w)
        out[huge] = 1.0 + w
    rest = ~huge
    tr = t[rest]
    p2 = 2.0 * np.exp(tr)
    x = np.expm1(tr) / E
    wr = np.empty(tr.shape)
    series = p2 < SERIES_P2_MAX
    wr[series] = _branch_series_wp1(p2[series])
    ns = ~series
    wr[ns] = _w0_core(x[ns], p2[ns]) + 1.0
    out[rest] = wr
    return out


def gamma_at(s: float, a: np.ndarray, c: np.ndarray, wp1=wp1_log) -> np.ndarray:
    """Bandwidth fractions at log-multiplier ``s``."""
    return a / wp1(s + c)


def dual_bisect(a: np.ndarray, c: np.ndarray, lo: float, hi: float, tol: float,
                max_iter: int, wp1=wp1_log) -> tuple[float, int, float]:
    """Find s with sum(gamma_at(s)) == 1 on a bracket where it changes sign."""
    return bisect(lambda s: float(np.sum(gamma_at(s, a, c, wp1))) - 1.0, lo, hi, tol, max_iter)
