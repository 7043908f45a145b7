"""Selection priorities for fixed bandwidth shares and upload times.

With gamma and t = T_k fixed, the relaxed scheduling objective separates per
device into

    J_k(beta) = (gamma B T_k N0 / h^2) (2^(beta L / (gamma B T_k)) - 1) - lambda beta,

a convex function whose stationary point is
``(gamma B T_k / L) log2(lambda h^2 / (N0 L ln2))``; the optimum is that point
clipped to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .model import LN2, Device, SystemParams, allowed_upload_time, device_arrays


@dataclass(frozen=True)
class PriorityResult:
    beta: np.ndarray
    unclamped: np.ndarray


def stationary_priority(h2, gamma, tk, params: SystemParams, tradeoff: float | None = None):
    """Unclamped stationary points; 0 where gamma or T_k is non-positive."""
    lam = params.tradeoff if tradeoff is None else tradeoff
    if not lam > 0:
        raise DomainError(f"tradeoff must be positive, got {lam!r}")
    h2, gamma, tk = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (h2, gamma, tk)))
    ok = (gamma > 0) & (tk > 0) & (h2 > 0)
    out = np.zeros(h2.shape)
    ratio = lam * h2[ok] / (params.noise * params.model_size * LN2)
    out[ok] = gamma[ok] * params.bandwidth * tk[ok] / params.model_size * np.log2(ratio)
    return out


def priority(dev: Device, params: SystemParams, gamma: float, t_allowed: float | None = None,
             tradeoff: float | None = None) -> float:
    """Optimal relaxed selection indicator of one device, in [0, 1]."""
    tk = allowed_upload_time(dev, params) if t_allowed is None else t_allowed
    raw = stationary_priority(dev.channel_gain ** 2, gamma, tk, params, tradeoff)
    return float(np.clip(raw, 0.0, 1.0))


def schedule_all(devices: Sequence[Device], params: SystemParams, gammas,
                 t_allowed=None, tradeoff: float | None = None) -> PriorityResult:
    h2, tk = device_arrays(devices, params)
    if t_allowed is not None:
        tk = np.asarray(t_allowed, dtype=np.float64)
    gammas = np.asarray(gammas, dtype=np.float64)
    if gammas.shape != h2.shape or tk.shape != h2.shape:
        raise DomainError("gamma/t vectors do not match the device list")
    raw = stationary_priority(h2, gammas, tk, params, tradeoff)
    return PriorityResult(np.clip(raw, 0.0, 1.0), raw)


def per_device_objective(beta, h2, gamma, tk, params: SystemParams,
                         tradeoff: float | None = None) -> np.ndarray:
    """J_k(beta) evaluated elementwise (broadcasting over ``beta``)."""
    lam = params.tradeoff if tradeoff is None else tradeoff
    width = gamma * params.bandwidth * tk
    beta = np.asarray(beta, dtype=np.float64)
    return width * params.noise / h2 * np.expm1(beta * params.model_size / width * LN2) - lam * beta
