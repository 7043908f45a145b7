"""Joint bandwidth allocation and scheduling by relaxation and rounding.

The selection indicators are relaxed to [0, 1] and the two closed-form block
updates (bandwidth for fixed beta, priorities for fixed bandwidth) alternate
until beta stops moving. The relaxed beta is then thresholded and the
bandwidth re-solved on the binary schedule.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bandwidth import DualSolveReport, solve_shares
from .errors import DomainError
from .model import Allocation, Device, SystemParams, build_allocation, device_arrays, energy_arrays
from .scheduling import stationary_priority

log = logging.getLogger(__name__)

INIT_MODES = ("random-uniform", "all-ones")


@dataclass(frozen=True)
class JointConfig:
    max_iters: int = 200
    convergence_tol: float = 1e-6
    rounding_threshold: float = 0.5
    init_mode: str = "random-uniform"
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")
        if not 0 < self.rounding_threshold < 1:
            raise DomainError("rounding_threshold must lie in (0, 1)")
        if not self.convergence_tol > 0:
            raise DomainError("convergence_tol must be positive")
        if self.init_mode not in INIT_MODES:
            raise DomainError(f"init_mode must be one of {INIT_MODES}")


@dataclass
class JointResult:
    final: Allocation
    relaxed_beta: np.ndarray
    iterations_used: int
    converged: bool
    objective: float
    relaxed_trajectory: list[np.ndarray] = field(default_factory=list)
    # relaxed objective after each half-step: bandwidth, scheduling, bandwidth, ...
    objective_trace: list[float] = field(default_factory=list)
    dual: DualSolveReport | None = None

    @property
    def scheduled_count(self) -> float:
        return self.final.scheduled_count


def relaxed_objective(h2, tk, gamma, beta, params: SystemParams) -> float:
    t = np.where(beta > 0, tk, 0.0)
    energy = energy_arrays(h2, gamma, t, beta, params)
    return float(np.sum(energy) - params.tradeoff * np.sum(beta))


def initial_beta(k: int, cfg: JointConfig) -> np.ndarray:
    if cfg.init_mode == "all-ones":
        return np.ones(k)
    return np.random.default_rng(cfg.rng_seed).uniform(0.0, 1.0, size=k)


def solve_joint_arrays(h2: np.ndarray, tk: np.ndarray, params: SystemParams,
                       cfg: JointConfig = JointConfig(),
                       keep_trajectory: bool = True) -> JointResult:
    h2 = np.asarray(h2, dtype=np.float64)
    tk = np.asarray(tk, dtype=np.float64)
    k = h2.size
    if k < 1:
        raise DomainError("need at least one device")
    feasible = (tk > 0) & (h2 > 0)
    beta = initial_beta(k, cfg)
    beta[~feasible] = 0.0

    trajectory = [beta.copy()] if keep_trajectory else []
    trace: list[float] = []
    converged = False
    it = 0
    while it < cfg.max_iters:
        if not np.any(beta > 0):
            converged = True
            break
        it += 1
        gamma, _ = solve_shares(h2, tk, beta, params)
        trace.append(relaxed_objective(h2, tk, gamma, beta, params))
        new = np.clip(stationary_priority(h2, gamma, tk, params), 0.0, 1.0)
        new[~feasible] = 0.0
        trace.append(relaxed_objective(h2, tk, gamma, new, params))
        step = float(np.max(np.abs(new - beta)))
        beta = new
        if keep_trajectory:
            trajectory.append(beta.copy())
        if step <= cfg.convergence_tol:
            converged = True
            break
    if not converged:
        log.info("joint iteration stopped at max_iters=%d without converging", cfg.max_iters)

    binary = np.where(beta >= cfg.rounding_threshold, 1.0, 0.0)
    if not np.any(binary > 0):
        final = Allocation.empty(k)
        final.upload_time = np.maximum(tk, 0.0)
        return JointResult(final, beta, it, converged, 0.0, trajectory, trace, None)
    gamma, report = solve_shares(h2, tk, binary, params)
    t = np.where(binary > 0, tk, np.maximum(tk, 0.0))
    final = build_allocation(h2, gamma, t, binary, params)
    objective = final.upload_energy - params.tradeoff * final.scheduled_count
    return JointResult(final, beta, it, converged, objective, trajectory, trace, report)


def solve_joint(devices: Sequence[Device], params: SystemParams,
                cfg: JointConfig = JointConfig()) -> JointResult:
    """Relaxation-and-rounding solution of the joint problem.

    Devices that cannot finish computing within the round are held at
    beta = 0 throughout. Non-convergence is reported through
    ``JointResult.converged``, not raised.
    """
    h2, tk = device_arrays(devices, params)
    return solve_joint_arrays(h2, tk, params, cfg)
