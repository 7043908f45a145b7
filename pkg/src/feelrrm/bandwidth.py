"""Energy-minimising bandwidth allocation for a fixed (possibly relaxed) schedule.

Every scheduled device transmits for its whole allowed time T_k, and its
bandwidth share is

    gamma_k(nu) = beta_k L ln2 / (B T_k [1 + W0((h_k^2 nu - B T_k N0) / (B T_k N0 e))])

with the multiplier nu chosen so that the shares sum to one. The sum is
strictly decreasing in nu, so nu is found by bisection. The bisection runs
on s = log(nu): nu spans hundreds of orders of magnitude when exponents are
large, and 1 + W0 is evaluated directly from s without cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import backend
from .errors import DomainError, InfeasibleScheduleError
from .model import LN2, Allocation, Device, SystemParams, build_allocation, device_arrays

UNBOUNDED = math.inf
DUAL_TOL = 1e-13
DUAL_MAX_ITER = 400


@dataclass(frozen=True)
class DualSolveReport:
    nu_star: float
    iterations: int
    residual: float
    log_nu: float


def _coefficients(h2: np.ndarray, tk: np.ndarray, beta: np.ndarray,
                  params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """(a, c) with gamma = a / (1 + W) and log-argument t = log(nu) + c."""
    bt = params.bandwidth * tk
    a = beta * params.model_size * LN2 / bt
    c = np.log(h2 / (bt * params.noise))
    return a, c


def _log_excess_energy(u: np.ndarray) -> np.ndarray:
    """log(e^u (u - 1) + 1) for u > 0."""
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    out = np.empty(u.shape)
    small = u < 1e-3
    us = u[small]
    # u - 1 + e^-u = (u^2 / 2)(1 - u/3 + u^2/12 - u^3/60 + ...), kept in log form
    # because u can be small enough for u^2 to underflow
    out[small] = us + 2.0 * np.log(us) - np.log(2.0) + np.log1p(us * (-1.0 / 3.0 + us * (1.0 / 12.0 - us / 60.0)))
    ul = u[~small]
    out[~small] = ul + np.log(ul + np.expm1(-ul))
    return out


def log_nu_for_share(a: np.ndarray, c: np.ndarray, share: float) -> np.ndarray:
    """log(nu) at which each device's share equals ``share`` (inverse of gamma_k)."""
    return _log_excess_energy(a / share) - c


def _check_schedule(h2: np.ndarray, tk: np.ndarray, beta: np.ndarray) -> np.ndarray:
    if np.any(beta < 0) or np.any(beta > 1):
        raise DomainError("beta entries must lie in [0, 1]")
    on = beta > 0
    if not on.any():
        raise InfeasibleScheduleError("no device is scheduled")
    if np.any(tk[on] <= 0):
        bad = np.flatnonzero(on & (tk <= 0)).tolist()
        raise DomainError(f"scheduled devices {bad} have no time left to upload")
    if np.any(h2[on] <= 0):
        raise DomainError("scheduled device with zero channel gain")
    return on


def solve_shares(h2: np.ndarray, tk: np.ndarray, beta: np.ndarray, params: SystemParams,
                 tol: float = DUAL_TOL) -> tuple[np.ndarray, DualSolveReport]:
    """Array-level bandwidth solve; returns (gamma, report)."""
    h2 = np.asarray(h2, dtype=np.float64)
    tk = np.asarray(tk, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    on = _check_schedule(h2, tk, beta)
    gamma = np.zeros(h2.shape)
    a, c = _coefficients(h2[on], tk[on], beta[on], params)
    n = a.size
    if n == 1:
        gamma[on] = 1.0
        s = float(log_nu_for_share(a, c, 1.0)[0])
        return gamma, DualSolveReport(_safe_exp(s), 0, 0.0, s)
    # sum(gamma) >= max share >= 1 at lo; every share <= 1/n at hi
    lo = float(np.max(log_nu_for_share(a, c, 1.0)))
    hi = float(np.max(log_nu_for_share(a, c, 1.0 / n)))
    if hi <= lo:
        hi = lo + 1.0
    s, iters, excess = backend.kernels.dual_bisect(a, c, lo, hi, tol, DUAL_MAX_ITER)
    gamma[on] = backend.kernels.gamma_at(s, a, c)
    return gamma, DualSolveReport(_safe_exp(s), iters, abs(excess), s)


def _safe_exp(s: float) -> float:
    try:
        return math.exp(s)
    except OverflowError:
        return math.inf


def gamma_of_nu(dev: Device, params: SystemParams, beta: float, nu: float) -> float:
    """Bandwidth share a device asks for at multiplier ``nu``.

    Returns :data:`UNBOUNDED` at ``nu == 0`` (the Lambert W argument sits on
    the branch point and the denominator vanishes).
    """
    if beta == 0:
        return 0.0
    tk = params.round_time - dev.compute_time
    if tk <= 0:
        raise DomainError(f"device {dev.id} has allowed time {tk!r} <= 0")
    if nu < 0:
        raise DomainError("nu must be non-negative")
    h2 = dev.channel_gain ** 2
    if h2 <= 0:
        raise DomainError(f"device {dev.id} has zero channel gain")
    if nu == 0:
        return UNBOUNDED
    a, c = _coefficients(np.array([h2]), np.array([tk]), np.array([float(beta)]), params)
    return float(backend.kernels.gamma_at(math.log(nu), a, c)[0])


def solve_p1(devices: Sequence[Device], params: SystemParams, beta,
             tol: float = DUAL_TOL) -> tuple[Allocation, DualSolveReport]:
    """Optimal bandwidth shares and upload times for schedule ``beta``.

    Unscheduled devices get zero bandwidth; scheduled ones upload for exactly
    their allowed time.
    """
    h2, tk = device_arrays(devices, params)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != h2.shape:
        raise DomainError("beta length does not match the device list")
    gamma, report = solve_shares(h2, tk, beta, params, tol)
    t = np.where(beta > 0, tk, np.maximum(tk, 0.0))
    return build_allocation(h2, gamma, t, beta, params), report


def uniform_baseline(devices: Sequence[Device], params: SystemParams, beta) -> Allocation:
    """Equal split of the band over all K devices, scheduled or not."""
    h2, tk = device_arrays(devices, params)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != h2.shape:
        raise DomainError("beta length does not match the device list")
    _check_schedule(h2, tk, beta)
    gamma = np.full(h2.shape, 1.0 / h2.size)
    t = np.where(beta > 0, tk, np.maximum(tk, 0.0))
    return build_allocation(h2, gamma, t, beta, params)


def kkt_residuals(devices: Sequence[Device], params: SystemParams, alloc: Allocation,
                  nu: float) -> np.ndarray:
    """Relative stationarity residuals of the bandwidth problem.

    For each scheduled device with 0 < gamma < 1 (so its bound multiplier is
    zero) evaluates

        (B T_k N0 / h^2) (2^v - v ln2 2^v - 1) + nu,  v = beta L / (gamma B T_k)

    divided by ``nu``. Other entries are NaN.
    """
    h2, tk = device_arrays(devices, params)
    out = np.full(h2.shape, np.nan)
    idx = (alloc.beta > 0) & (alloc.gamma > 0) & (alloc.gamma < 1)
    bt = params.bandwidth * tk[idx]
    v = alloc.beta[idx] * params.model_size / (alloc.gamma[idx] * bt)
    p = np.exp2(v)
    grad = bt * params.noise / h2[idx] * (p - v * LN2 * p - 1.0)
    out[idx] = (grad + nu) / nu
    return out
