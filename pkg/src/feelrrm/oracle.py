"""Brute-force reference solvers.

These deliberately avoid the closed forms: bandwidth shares come from a
zooming grid over the simplex, priorities from a zooming 1-D scan, and binary
schedules from full enumeration. Objectives are re-evaluated here from the
raw energy expression so a bug in the model helpers cannot hide itself.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bandwidth import solve_shares
from .errors import DimensionError, DomainError
from .model import Device, SystemParams

MAX_SIMPLEX_DIM = 4
MAX_EXHAUSTIVE = 12
_POINT_BUDGET = 4_000_000


@dataclass(frozen=True)
class GridSpec:
    resolution: int = 2000        # 1-D scans
    simplex_resolution: int = 400  # per free coordinate on the simplex
    refine_passes: int = 2          # each pass zooms x10 around the incumbent

    def __post_init__(self):
        if self.resolution < 10 or self.simplex_resolution < 10:
            raise DomainError("grid resolution must be >= 10")
        if self.refine_passes < 0:
            raise DomainError("refine_passes must be >= 0")


def _raw_energy(gamma, t, beta, h2, params: SystemParams):
    """(gamma B t N0 / h^2)(2^(beta L / (gamma B t)) - 1), inf where it blows up."""
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        width = gamma * params.bandwidth * t
        e = width * params.noise / h2 * (np.exp2(beta * params.model_size / width) - 1.0)
    return np.where(np.isfinite(e), e, np.inf)


def _windows(center: np.ndarray, span: float, n: int) -> list[np.ndarray]:
    axes = []
    for c in center:
        lo = max(0.0, c - span / 2)
        hi = min(1.0, c + span / 2)
        axes.append(np.linspace(lo, hi, n))
    return axes


def oracle_p1(devices: Sequence[Device], params: SystemParams, beta,
              grid: GridSpec = GridSpec()) -> tuple[np.ndarray, float]:
    """Grid-search the bandwidth simplex with every upload time at T_k.

    Only scheduled devices take part; the rest get zero bandwidth. Returns
    ``(gamma, objective)``.
    """
    beta = np.asarray(beta, dtype=np.float64)
    if beta.size != len(devices):
        raise DomainError("beta length does not match the device list")
    on = np.flatnonzero(beta > 0)
    if on.size == 0:
        raise DomainError("oracle_p1 needs at least one scheduled device")
    if on.size > MAX_SIMPLEX_DIM:
        raise DimensionError(f"simplex grid supports at most {MAX_SIMPLEX_DIM} scheduled devices")
    h2 = np.array([devices[i].channel_gain ** 2 for i in on])
    tk = np.array([params.round_time - devices[i].compute_time for i in on])
    b = beta[on]
    gamma = np.zeros(beta.size)
    n = on.size
    if n == 1:
        gamma[on] = 1.0
        return gamma, float(_raw_energy(1.0, tk[0], b[0], h2[0], params))

    dims = n - 1
    res = grid.resolution if dims == 1 else grid.simplex_resolution
    res = min(res, int(_POINT_BUDGET ** (1.0 / dims)))
    center = np.full(dims, 0.5)
    span = 1.0
    best_val, best_pt = math.inf, None
    for _ in range(grid.refine_passes + 1):
        mesh = np.meshgrid(*_windows(center, span, res), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        last = 1.0 - pts.sum(axis=1, keepdims=True)
        pts = np.hstack([pts, last])
        pts = pts[np.all(pts > 0, axis=1)]
        vals = _raw_energy(pts, tk, b, h2, params).sum(axis=1)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_pt = float(vals[i]), pts[i]
        center = best_pt[:-1]
        span /= 10.0
    gamma[on] = best_pt
    return gamma, best_val


def oracle_upload_time(dev: Device, params: SystemParams, gamma: float, beta: float = 1.0,
                       grid: GridSpec = GridSpec()) -> float:
    """Scan t over (0, T_k] for the cheapest upload time at fixed bandwidth."""
    tk = params.round_time - dev.compute_time
    if tk <= 0:
        raise DomainError("device has no upload time")
    ts = np.linspace(tk / grid.resolution, tk, grid.resolution)
    vals = _raw_energy(gamma, ts, beta, dev.channel_gain ** 2, params)
    return float(ts[int(np.argmin(vals))])


def oracle_p4(dev: Device, params: SystemParams, gamma: float, t_allowed: float,
              tradeoff: float, grid: GridSpec = GridSpec()) -> tuple[float, float]:
    """Zooming 1-D scan of the per-device scheduling objective over [0, 1]."""
    if not (gamma > 0 and t_allowed > 0):
        raise DomainError("oracle_p4 needs gamma > 0 and t_allowed > 0")
    h2 = dev.channel_gain ** 2

    def objective(b):
        return _raw_energy(gamma, t_allowed, b, h2, params) - tradeoff * b

    center, span = 0.5, 1.0
    best_b, best_val = 0.0, float(objective(np.array(0.0)))
    for _ in range(grid.refine_passes + 1):
        bs = _windows(np.array([center]), span, grid.resolution)[0]
        vals = objective(bs)
        i = int(np.argmin(vals))
        if vals[i] < best_val or (vals[i] == best_val and bs[i] < best_b):
            best_b, best_val = float(bs[i]), float(vals[i])
        center = best_b
        span /= 10.0
    return best_b, best_val


def oracle_p2_exhaustive(devices: Sequence[Device], params: SystemParams,
                         tradeoff: float | None = None) -> tuple[np.ndarray, float]:
    """Enumerate every binary schedule, each with its own optimal bandwidth split.

    Devices without time to upload are never scheduled. Ties go to the
    schedule enumerated first (all-zeros first, lexicographic order).
    """
    lam = params.tradeoff if tradeoff is None else tradeoff
    k = len(devices)
    if k > MAX_EXHAUSTIVE:
        raise DimensionError(f"exhaustive search supports at most {MAX_EXHAUSTIVE} devices")
    h2 = np.array([d.channel_gain ** 2 for d in devices])
    tk = np.array([params.round_time - d.compute_time for d in devices])
    usable = (tk > 0) & (h2 > 0)
    best = np.zeros(k)
    best_val = 0.0
    for bits in itertools.product((0.0, 1.0), repeat=k):
        b = np.array(bits)
        if not b.any() or np.any(b[~usable] > 0):
            continue
        gamma, _ = solve_shares(h2, tk, b, params)
        on = b > 0
        energy = _raw_energy(gamma[on], tk[on], 1.0, h2[on], params).sum()
        val = float(energy - lam * b.sum())
        if val < best_val:
            best, best_val = b, val
    return best, best_val
