"""Monte-Carlo harness: random device populations and policy sweeps over the
round time T."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .bandwidth import solve_shares
from .errors import ConfigError
from .joint import JointConfig, solve_joint_arrays
from .model import Device, SystemParams, build_allocation

log = logging.getLogger(__name__)

DEFAULT_T_SWEEP = (0.012, 0.015, 0.02, 0.03, 0.05)


@dataclass(frozen=True)
class ScenarioConfig:
    num_devices: int = 50
    path_loss: float = 1e-4
    compute_time_range: tuple[float, float] = (0.0, 0.010)
    params: SystemParams = field(default_factory=SystemParams)
    t_sweep: tuple[float, ...] = DEFAULT_T_SWEEP
    trials: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        lo, hi = self.compute_time_range
        if self.num_devices < 1:
            raise ConfigError("num_devices must be >= 1")
        if not (lo >= 0 and hi > lo):
            raise ConfigError("compute_time_range needs 0 <= lo < hi")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.path_loss > 0:
            raise ConfigError("path_loss must be positive")
        if not self.t_sweep or any(t <= 0 for t in self.t_sweep):
            raise ConfigError("t_sweep must be a non-empty list of positive times")
        object.__setattr__(self, "t_sweep", tuple(float(t) for t in self.t_sweep))
        object.__setattr__(self, "compute_time_range", (float(lo), float(hi)))


@dataclass(frozen=True)
class SweepResult:
    T: float
    mean_total_energy_proposed: float
    mean_total_energy_baseline: float
    mean_scheduled_count: float
    energy_reduction_ratio: float
    tradeoff: float | None = None


def _trial_rng(cfg: ScenarioConfig, trial: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng([cfg.rng_seed, trial, stream])


def population_arrays(cfg: ScenarioConfig, trial: int) -> tuple[np.ndarray, np.ndarray]:
    """``(h^2, t_comp)`` for one trial; identical for identical (seed, trial)."""
    rng = _trial_rng(cfg, trial)
    lo, hi = cfg.compute_time_range
    h2 = cfg.path_loss * rng.exponential(1.0, size=cfg.num_devices)
    # hi - U[0, hi - lo) lands in (lo, hi]
    tcomp = hi - rng.uniform(0.0, hi - lo, size=cfg.num_devices)
    return h2, tcomp


def generate_population(cfg: ScenarioConfig, trial: int) -> list[Device]:
    """Rayleigh-faded devices: exponential power gains with mean ``path_loss``."""
    h2, tcomp = population_arrays(cfg, trial)
    return [Device.from_power_gain(i, float(g), float(t)) for i, (g, t) in enumerate(zip(h2, tcomp))]


def reduction_ratio(baseline: float, proposed: float) -> float:
    return (baseline - proposed) / baseline if baseline > 0 else 0.0


def _full_schedule_energy(h2, tk, params: SystemParams, uniform: bool = False) -> float:
    on = tk > 0
    beta = on.astype(np.float64)
    if uniform:
        gamma = np.full(h2.shape, 1.0 / h2.size)
    else:
        gamma, _ = solve_shares(h2, tk, beta, params)
    t = np.where(on, tk, 0.0)
    alloc = build_allocation(h2, gamma, t, beta, params)
    return alloc.total_energy(params)


def _population(cfg: ScenarioConfig, trial: int, fixed):
    if fixed is None:
        return population_arrays(cfg, trial)
    return fixed


def fixed_population(devices: Sequence[Device]) -> tuple[np.ndarray, np.ndarray]:
    """Freeze an explicit device list so every trial of a sweep reuses it."""
    return (np.array([d.channel_gain ** 2 for d in devices]),
            np.array([d.compute_time for d in devices]))


def run_sweep_allocation(cfg: ScenarioConfig, population=None) -> list[SweepResult]:
    """Every device scheduled; optimal bandwidth split against the equal split.

    ``population`` (from :func:`fixed_population`) replaces the random draws.
    """
    lo, hi = cfg.compute_time_range
    if population is not None:
        hi = float(np.max(population[1]))
    bad = [t for t in cfg.t_sweep if t <= hi]
    if bad:
        raise ConfigError(f"round times {bad} do not exceed the largest compute time {hi}")
    rows = []
    for T in cfg.t_sweep:
        params = replace(cfg.params, round_time=T)
        prop = np.empty(cfg.trials)
        base = np.empty(cfg.trials)
        for trial in range(cfg.trials):
            h2, tcomp = _population(cfg, trial, population)
            tk = T - tcomp
            prop[trial] = _full_schedule_energy(h2, tk, params)
            base[trial] = _full_schedule_energy(h2, tk, params, uniform=True)
        ep, eb = float(prop.mean()), float(base.mean())
        rows.append(SweepResult(T, ep, eb, float(h2.size), reduction_ratio(eb, ep)))
        log.debug("allocation sweep T=%g proposed=%g baseline=%g", T, ep, eb)
    return rows


def joint_seed(cfg: ScenarioConfig, trial: int) -> int:
    return int(np.random.SeedSequence([cfg.rng_seed, trial, 1]).generate_state(1)[0])


def calibrate_tradeoff(cfg: ScenarioConfig, target_fraction: float = 0.9,
                       trials: int | None = None, population=None) -> float:
    """Tradeoff at which about ``target_fraction`` of devices are worth scheduling
    at the largest swept T.

    With everyone scheduled and the optimal split in place, device k's relaxed
    priority reaches 1 once lambda >= 2^(L / (gamma_k B T_k)) N0 L ln2 / h_k^2.
    The returned value is the ``target_fraction`` quantile of that threshold
    pooled over trials.
    """
    T = max(cfg.t_sweep)
    p = replace(cfg.params, round_time=T)
    thresholds = []
    n = 1 if population is not None else (min(cfg.trials, 20) if trials is None else trials)
    for trial in range(n):
        h2, tcomp = _population(cfg, trial, population)
        tk = T - tcomp
        on = tk > 0
        gamma, _ = solve_shares(h2, tk, on.astype(np.float64), p)
        bits = p.model_size / (gamma[on] * p.bandwidth * tk[on])
        thresholds.append(bits + np.log2(p.noise * p.model_size * np.log(2.0) / h2[on]))
    log2_lam = float(np.quantile(np.concatenate(thresholds), target_fraction))
    return float(2.0 ** log2_lam)


def run_sweep_joint(cfg: ScenarioConfig, tradeoff: float | None = None,
                    joint: JointConfig = JointConfig(), population=None) -> list[SweepResult]:
    """Joint scheduling against scheduling every device that can finish in time.

    ``tradeoff=None`` uses :func:`calibrate_tradeoff`.
    """
    lam = calibrate_tradeoff(cfg, population=population) if tradeoff is None else float(tradeoff)
    rows = []
    for T in cfg.t_sweep:
        params = replace(cfg.params, round_time=T, tradeoff=lam)
        prop = np.empty(cfg.trials)
        base = np.empty(cfg.trials)
        count = np.empty(cfg.trials)
        for trial in range(cfg.trials):
            h2, tcomp = _population(cfg, trial, population)
            tk = T - tcomp
            if not np.any(tk > 0):
                prop[trial] = base[trial] = count[trial] = 0.0
                continue
            base[trial] = _full_schedule_energy(h2, tk, params)
            res = solve_joint_arrays(h2, tk, params, replace(joint, rng_seed=joint_seed(cfg, trial)),
                                     keep_trajectory=False)
            prop[trial] = res.final.total_energy(params)
            count[trial] = res.scheduled_count
        ep, eb = float(prop.mean()), float(base.mean())
        rows.append(SweepResult(T, ep, eb, float(count.mean()), reduction_ratio(eb, ep), lam))
        log.debug("joint sweep T=%g proposed=%g baseline=%g scheduled=%g", T, ep, eb, count.mean())
    return rows


def sweep_table(rows: Sequence[SweepResult]) -> list[dict]:
    return [
        {
            "T": r.T,
            "energy_proposed": r.mean_total_energy_proposed,
            "energy_baseline": r.mean_total_energy_baseline,
            "scheduled_count": r.mean_scheduled_count,
            "reduction_ratio": r.energy_reduction_ratio,
        }
        for r in rows
    ]
