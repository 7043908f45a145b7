"""Oracle-agreement checks behind ``feelrrm validate``."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from types import SimpleNamespace
from typing import Callable

import numpy as np

from . import _np_kernels, backend
from .bandwidth import kkt_residuals, solve_p1
from .joint import JointConfig, solve_joint
from .model import LN2, Device, SystemParams
from .oracle import GridSpec, oracle_p1, oracle_p2_exhaustive, oracle_p4
from .scheduling import priority

LEVELS = {
    "fast": dict(p1=10, kkt=50, kkt_max_k=20, p4=200, p2=3, p2_k=8, w=10_000),
    "full": dict(p1=100, kkt=1000, kkt_max_k=50, p4=1000, p2=20, p2_k=10, w=100_000),
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def random_instance(rng: np.random.Generator, k: int, t_range=(0.012, 0.05),
                    path_loss: float = 1e-4) -> tuple[list[Device], SystemParams]:
    """Random devices in the default scenario's ranges, with a random round time."""
    T = float(rng.uniform(*t_range))
    h2 = path_loss * rng.exponential(size=k)
    tcomp = 0.01 - rng.uniform(0.0, 0.01, size=k)
    devs = [Device.from_power_gain(i, float(g), float(t)) for i, (g, t) in enumerate(zip(h2, tcomp))]
    return devs, SystemParams(round_time=T)


def random_priority_case(rng: np.random.Generator):
    """(device, params, gamma, T_k, lambda) with the stationary point drawn
    from [-0.5, 1.5] so all three clamp regimes show up."""
    devs, params = random_instance(rng, 1)
    dev = devs[0]
    tk = params.round_time - dev.compute_time
    gamma = float(rng.uniform(0.05, 1.0))
    target = float(rng.uniform(-0.5, 1.5))
    bits = params.model_size / (gamma * params.bandwidth * tk)
    lam = params.noise * params.model_size * LN2 / dev.channel_gain ** 2 * 2.0 ** (target * bits)
    return dev, params, gamma, tk, lam, target


def check_lambert(n: int) -> tuple[bool, str]:
    x = -1.0 / math.e + np.logspace(-12, math.log10(1e9 + 1.0 / math.e), n)
    w = backend.kernels.lambertw0(x)
    rel = np.abs(w * np.exp(w) - x) / np.maximum(np.abs(x), 1e-300)
    worst = float(np.nanmax(rel)) if np.all(np.isfinite(w)) else math.inf
    return worst <= 1e-10, f"max rel residual {worst:.2e} over {n} points"


def check_p1(n: int, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng([seed, 1])
    worst = 0.0
    for _ in range(n):
        devs, params = random_instance(rng, int(rng.integers(2, 4)))
        beta = np.ones(len(devs))
        alloc, _ = solve_p1(devs, params, beta)
        _, ref = oracle_p1(devs, params, beta)
        worst = max(worst, abs(alloc.upload_energy - ref) / ref)
    return worst <= 1e-4, f"max rel objective gap {worst:.2e} over {n} instances"


def check_kkt(n: int, max_k: int, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng([seed, 2])
    worst_st, worst_sum = 0.0, 0.0
    for _ in range(n):
        devs, params = random_instance(rng, int(rng.integers(2, max_k + 1)))
        beta = np.ones(len(devs)) if rng.random() < 0.5 else rng.uniform(0.05, 1.0, len(devs))
        alloc, rep = solve_p1(devs, params, beta)
        res = kkt_residuals(devs, params, alloc, rep.nu_star)
        worst_st = max(worst_st, float(np.nanmax(np.abs(res))))
        worst_sum = max(worst_sum, abs(float(np.sum(alloc.gamma)) - 1.0))
    ok = worst_st < 1e-6 and worst_sum < 1e-9
    return ok, f"stationarity {worst_st:.2e}, |sum(gamma)-1| {worst_sum:.2e}"


def check_p4(n: int, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng([seed, 3])
    grid = GridSpec(refine_passes=4)
    worst = 0.0
    for _ in range(n):
        dev, params, gamma, tk, lam, _ = random_priority_case(rng)
        b_closed = priority(dev, params, gamma, tk, tradeoff=lam)
        b_scan, _ = oracle_p4(dev, params, gamma, tk, lam, grid)
        worst = max(worst, abs(b_closed - b_scan))
    return worst <= 1e-6, f"max |beta - scan| {worst:.2e} over {n} cases"


def check_p2(n: int, k: int, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng([seed, 4])
    worst = 0.0
    for i in range(n):
        devs, params = random_instance(rng, k)
        params = replace(params, tradeoff=float(10 ** rng.uniform(2, 5)))
        res = solve_joint(devs, params, JointConfig(rng_seed=seed + i))
        _, best = oracle_p2_exhaustive(devs, params)
        gap = (res.objective - best) / abs(best) if best < 0 else res.objective - best
        worst = max(worst, gap)
    return worst <= 0.05, f"max rounding gap {worst:.2%} over {n} instances (K={k})"


def run_checks(level: str = "fast", seed: int = 0) -> list[CheckResult]:
    cfg = LEVELS[level]
    checks: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
        ("lambert_w0 residual", lambda: check_lambert(cfg["w"])),
        ("bandwidth vs simplex grid", lambda: check_p1(cfg["p1"], seed)),
        ("bandwidth KKT residuals", lambda: check_kkt(cfg["kkt"], cfg["kkt_max_k"], seed)),
        ("priority vs 1-D scan", lambda: check_p4(cfg["p4"], seed)),
        ("joint vs exhaustive", lambda: check_p2(cfg["p2"], cfg["p2_k"], seed)),
    ]
    out = []
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, ok, detail, time.perf_counter() - t0))
    return out


def faulty_kernels(shift: float = 1e-3) -> SimpleNamespace:
    """numpy kernels with 1 + W0 shifted by ``shift``; the residual checks trip on it."""
    def bad_lambertw0(x):
        return _np_kernels.lambertw0(x) + shift

    def bad_wp1(t):
        return _np_kernels.wp1_log(t) + shift

    return SimpleNamespace(
        __name__="faulty",
        lambertw0=bad_lambertw0,
        wp1_log=bad_wp1,
        gamma_at=lambda s, a, c: _np_kernels.gamma_at(s, a, c, bad_wp1),
        dual_bisect=lambda a, c, lo, hi, tol, it: _np_kernels.dual_bisect(a, c, lo, hi, tol, it, bad_wp1),
    )


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        lines.append(f"{tag}  {r.name:<{width}}  {r.seconds:7.2f}s  {r.detail}")
    return "\n".join(lines)

