"""System model: devices, shared round parameters, and the rate/energy/time
formulas every optimizer works with.

Units are SI throughout (s, Hz, W, bits, J). ``Device.channel_gain`` is the
amplitude gain h; formulas use its square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, EnergyOverflowError

LN2 = math.log(2.0)
MAX_EXPONENT_BITS = 1024.0


@dataclass(frozen=True)
class Device:
    id: int
    channel_gain: float
    compute_time: float

    def __post_init__(self):
        if not self.channel_gain >= 0:
            raise DomainError(f"device {self.id}: channel_gain must be >= 0")
        if not self.compute_time >= 0:
            raise DomainError(f"device {self.id}: compute_time must be >= 0")

    @property
    def power_gain(self) -> float:
        return self.channel_gain ** 2

    @classmethod
    def from_power_gain(cls, id: int, power_gain: float, compute_time: float) -> "Device":
        return cls(id, math.sqrt(power_gain), compute_time)


@dataclass(frozen=True)
class SystemParams:
    bandwidth: float = 1e6
    noise: float = 1e-8
    model_size: float = 1e4
    round_time: float = 0.02
    tradeoff: float = 1.0
    compute_energy: float = 0.0

    def __post_init__(self):
        for name in ("bandwidth", "noise", "model_size", "round_time", "tradeoff"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")
        if not self.compute_energy >= 0:
            raise DomainError("compute_energy must be >= 0")


@dataclass
class Allocation:
    """Per-device bandwidth fractions, upload times, selection indicators and
    the resulting power spectral density and upload energy."""

    gamma: np.ndarray
    upload_time: np.ndarray
    beta: np.ndarray
    per_device_energy: np.ndarray
    per_device_power: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.per_device_power is None:
            self.per_device_power = np.zeros_like(self.gamma)

    @property
    def num_devices(self) -> int:
        return int(self.gamma.size)

    @property
    def upload_energy(self) -> float:
        return float(np.sum(self.per_device_energy))

    @property
    def scheduled_count(self) -> float:
        return float(np.sum(self.beta))

    def total_energy(self, params: SystemParams) -> float:
        """Upload energy plus the fixed training energy of every scheduled device."""
        return self.upload_energy + params.compute_energy * self.scheduled_count

    @classmethod
    def empty(cls, k: int) -> "Allocation":
        z = np.zeros(k)
        return cls(z.copy(), z.copy(), z.copy(), z.copy(), z.copy())


def allowed_upload_time(dev: Device, params: SystemParams) -> float:
    """T - t_comp; non-positive means the device cannot finish this round."""
    return params.round_time - dev.compute_time


def device_arrays(devices: Sequence[Device], params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Stack ``(h^2, T_k)`` for a device list."""
    h2 = np.array([d.channel_gain ** 2 for d in devices], dtype=np.float64)
    tk = np.array([allowed_upload_time(d, params) for d in devices], dtype=np.float64)
    return h2, tk


def energy_arrays(h2: np.ndarray, gamma: np.ndarray, t: np.ndarray, beta: np.ndarray,
                  params: SystemParams, max_bits: float = MAX_EXPONENT_BITS) -> np.ndarray:
    """Vectorised upload energy; zero wherever beta == 0."""
    h2, gamma, t, beta = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64)
                                               for v in (h2, gamma, t, beta)))
    out = np.zeros(h2.shape)
    on = beta > 0
    if not on.any():
        return out
    if np.any(h2[on] <= 0):
        raise DomainError("zero channel gain with beta > 0 needs infinite energy")
    if np.any(gamma[on] <= 0) or np.any(t[on] <= 0):
        raise DomainError("scheduled device needs gamma > 0 and t > 0")
    width = gamma[on] * params.bandwidth * t[on]
    bits = beta[on] * params.model_size / width
    if np.any(bits > max_bits):
        raise EnergyOverflowError(
            f"energy exponent {bits.max():.1f} bits exceeds cap {max_bits:g}")
    out[on] = width * params.noise / h2[on] * np.expm1(bits * LN2)
    return out


def upload_energy(dev: Device, params: SystemParams, gamma: float, t: float, beta: float,
                  max_bits: float = MAX_EXPONENT_BITS) -> float:
    """Energy (J) to push ``beta * L`` bits through ``gamma * B`` Hz in ``t`` seconds."""
    if beta == 0:
        return 0.0
    if not 0 <= beta <= 1:
        raise DomainError(f"beta must lie in [0, 1], got {beta!r}")
    return float(energy_arrays(dev.channel_gain ** 2, gamma, t, beta, params, max_bits)[()])


def power_spectral_density(energy: np.ndarray, gamma: np.ndarray, t: np.ndarray,
                           params: SystemParams) -> np.ndarray:
    """Transmit power per Hz, p = E / (gamma B t); zero for idle devices."""
    width = gamma * params.bandwidth * t
    return np.divide(energy, width, out=np.zeros_like(energy), where=width > 0)


def build_allocation(h2: np.ndarray, gamma: np.ndarray, t: np.ndarray, beta: np.ndarray,
                     params: SystemParams) -> Allocation:
    gamma = np.asarray(gamma, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    energy = energy_arrays(h2, gamma, t, beta, params)
    return Allocation(gamma, t, beta, energy, power_spectral_density(energy, gamma, t, params))


def total_objective(devices: Sequence[Device], params: SystemParams, alloc: Allocation,
                    tradeoff: float | None = None) -> float:
    """Upload energy minus the learning reward, sum(E_k) - lambda * sum(beta_k).

    ``tradeoff`` overrides ``params.tradeoff``; pass 0 for plain upload energy.
    """
    lam = params.tradeoff if tradeoff is None else tradeoff
    if alloc.num_devices != len(devices):
        raise DomainError("allocation size does not match device list")
    h2, _ = device_arrays(devices, params)
    energy = energy_arrays(h2, alloc.gamma, alloc.upload_time, alloc.beta, params)
    return float(np.sum(energy) - lam * np.sum(alloc.beta))
