"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_backends.py [--repeat 5]

Times three workloads per backend (best of ``--repeat``, after a warm-up
call so JIT compilation is excluded) and checks the outputs agree.
"""
import argparse
import math
import time

import numpy as np

from feelrrm import backend
from feelrrm.bandwidth import solve_shares
from feelrrm.model import SystemParams
from feelrrm.sim import ScenarioConfig, run_sweep_joint


def lambert_grid():
    x = -1.0 / math.e + np.logspace(-12, math.log10(1e9 + 1.0 / math.e), 1_000_000)
    return backend.kernels.lambertw0(x)


def _share_cases(n=200, k=50):
    rng = np.random.default_rng(0)
    p = SystemParams()
    return p, [(1e-4 * rng.exponential(size=k), 0.02 - rng.uniform(0, 0.01, size=k)) for _ in range(n)]


SHARE_PARAMS, SHARE_CASES = _share_cases()


def bandwidth_solves():
    ones = np.ones(50)
    return np.concatenate([solve_shares(h2, tk, ones, SHARE_PARAMS)[0] for h2, tk in SHARE_CASES])


def joint_sweep():
    cfg = ScenarioConfig(num_devices=30, trials=5, t_sweep=(0.015, 0.03, 0.05))
    rows = run_sweep_joint(cfg, tradeoff=5e3)
    return np.array([r.mean_total_energy_proposed for r in rows])


WORKLOADS = {
    "lambert_w0, 1e6 points": lambert_grid,
    "bandwidth split, 200 x K=50": bandwidth_solves,
    "joint sweep, 30 devices x 5 trials x 3 T": joint_sweep,
}


def best_time(fn, repeat):
    fn()  # warm-up / JIT
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"{'workload':<42} {'numba':>10} {'numpy':>10} {'speedup':>8}  max rel diff")
    for label, fn in WORKLOADS.items():
        res = {}
        for name in ("numba", "numpy"):
            with backend.use(name):
                res[name] = best_time(fn, args.repeat)
        (t_nb, a), (t_np, b) = res["numba"], res["numpy"]
        diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
        print(f"{label:<42} {t_nb * 1e3:>8.1f}ms {t_np * 1e3:>8.1f}ms {t_np / t_nb:>7.1f}x  {diff:.1e}")


if __name__ == "__main__":
    main()
