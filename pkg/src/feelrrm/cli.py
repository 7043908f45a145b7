"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 infeasible/solver domain
error, 4 validation failure.
"""

from __future__ import annotations

import csv
import datetime as _dt
import functools
import io
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import click

from . import __version__, backend
from .bandwidth import solve_p1
from .config import RunConfig, apply_override, digest, dump, load_raw, resolve, with_overrides
from .errors import ConfigError, RRMError
from .joint import solve_joint
from .model import device_arrays
from .scheduling import schedule_all
from .sim import calibrate_tradeoff, fixed_population, run_sweep_allocation, run_sweep_joint, sweep_table
from .validate import faulty_kernels, format_table, run_checks

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_VALIDATION = 4

SWEEP_COLUMNS = ("T", "energy_proposed", "energy_baseline", "scheduled_count", "reduction_ratio")

log = logging.getLogger("feelrrm")


def _setup_logging() -> None:
    level = os.environ.get("RRM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except RRMError as exc:
            click.echo(f"infeasible: {exc}", err=True)
            sys.exit(EXIT_INFEASIBLE)
    return wrapper


def _config_options(fn):
    fn = click.option("--set", "sets", multiple=True, metavar="SECTION.KEY=VALUE",
                      help="Override one config field (repeatable).")(fn)
    fn = click.option("--out", type=click.Path(dir_okay=False), default=None,
                      help="Output file (default: stdout).")(fn)
    fn = click.option("--trials", type=int, default=None, help="Monte-Carlo trials.")(fn)
    fn = click.option("--lambda", "tradeoff", type=float, default=None,
                      help="Energy/learning tradeoff factor.")(fn)
    fn = click.option("--seed", type=int, default=None, help="RNG seed.")(fn)
    fn = click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                      help="YAML config file.")(fn)
    return fn


def load_run_config(config_path, sets, seed, tradeoff, trials) -> RunConfig:
    raw = load_raw(config_path)
    for item in sets:
        raw = apply_override(raw, item)
    cfg = resolve(raw)
    return with_overrides(cfg, seed=seed, tradeoff=tradeoff, trials=trials)


def manifest(command: str, cfg: RunConfig, **extra) -> dict:
    resolved = dump(cfg)
    out = {
        "command": command,
        "config_digest": digest(resolved),
        "seed": cfg.scenario.rng_seed,
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "backend": backend.name,
        "resolved_config": resolved,
    }
    out.update(extra)
    return out


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(out).write_text(text)


def _resolve_tradeoff(cfg: RunConfig) -> tuple[RunConfig, str]:
    if cfg.tradeoff_given:
        return cfg, "config"
    scen = replace(cfg.scenario, t_sweep=(cfg.params.round_time,))
    lam = calibrate_tradeoff(scen)
    params = replace(cfg.params, tradeoff=lam)
    return replace(cfg, params=params), "calibrated"


@click.group()
@click.version_option(__version__)
def main():
    """Energy-efficient bandwidth allocation and scheduling for federated edge learning."""
    _setup_logging()


@main.command()
@_config_options
@_exit_codes
def allocate(config_path, seed, tradeoff, trials, out, sets):
    """Optimal bandwidth split for the configured schedule."""
    cfg = load_run_config(config_path, sets, seed, tradeoff, trials)
    devices = cfg.population()
    beta = cfg.schedule()
    alloc, rep = solve_p1(devices, cfg.params, beta)
    h2, tk = device_arrays(devices, cfg.params)
    rows = [
        {"id": d.id, "power_gain": float(h2[i]), "allowed_time": float(tk[i]),
         "beta": float(alloc.beta[i]), "gamma": float(alloc.gamma[i]),
         "upload_time": float(alloc.upload_time[i]), "power": float(alloc.per_device_power[i]),
         "energy": float(alloc.per_device_energy[i])}
        for i, d in enumerate(devices)
    ]
    doc = {
        "manifest": manifest("allocate", cfg),
        "nu_star": rep.nu_star,
        "log_nu_star": rep.log_nu,
        "dual_iterations": rep.iterations,
        "dual_residual": rep.residual,
        "devices": rows,
        "totals": {
            "upload_energy": alloc.upload_energy,
            "total_energy": alloc.total_energy(cfg.params),
            "scheduled_count": alloc.scheduled_count,
        },
    }
    _emit(json.dumps(doc, indent=2) + "\n", out)


@main.command()
@_config_options
@_exit_codes
def schedule(config_path, seed, tradeoff, trials, out, sets):
    """Selection priorities given the optimal split over the configured schedule."""
    cfg = load_run_config(config_path, sets, seed, tradeoff, trials)
    cfg, source = _resolve_tradeoff(cfg)
    devices = cfg.population()
    alloc, _ = solve_p1(devices, cfg.params, cfg.schedule())
    h2, tk = device_arrays(devices, cfg.params)
    pr = schedule_all(devices, cfg.params, alloc.gamma, tk)
    rows = [
        {"id": d.id, "power_gain": float(h2[i]), "allowed_time": float(tk[i]),
         "gamma": float(alloc.gamma[i]), "priority_unclamped": float(pr.unclamped[i]),
         "priority": float(pr.beta[i])}
        for i, d in enumerate(devices)
    ]
    doc = {"manifest": manifest("schedule", cfg, tradeoff=cfg.params.tradeoff, tradeoff_source=source),
           "devices": rows}
    _emit(json.dumps(doc, indent=2) + "\n", out)


@main.command()
@_config_options
@_exit_codes
def joint(config_path, seed, tradeoff, trials, out, sets):
    """Joint bandwidth allocation and scheduling (relaxation and rounding)."""
    cfg = load_run_config(config_path, sets, seed, tradeoff, trials)
    cfg, source = _resolve_tradeoff(cfg)
    devices = cfg.population()
    res = solve_joint(devices, cfg.params, cfg.joint)
    h2, tk = device_arrays(devices, cfg.params)
    fin = res.final
    rows = [
        {"id": d.id, "power_gain": float(h2[i]), "allowed_time": float(tk[i]),
         "beta_relaxed": float(res.relaxed_beta[i]), "beta": float(fin.beta[i]),
         "gamma": float(fin.gamma[i]), "upload_time": float(fin.upload_time[i]),
         "power": float(fin.per_device_power[i]), "energy": float(fin.per_device_energy[i])}
        for i, d in enumerate(devices)
    ]
    doc = {
        "manifest": manifest("joint", cfg, tradeoff=cfg.params.tradeoff, tradeoff_source=source),
        "converged": res.converged,
        "iterations": res.iterations_used,
        "objective": res.objective,
        "relaxed_objective_trace": res.objective_trace,
        "scheduled_count": res.scheduled_count,
        "upload_energy": fin.upload_energy,
        "total_energy": fin.total_energy(cfg.params),
        "devices": rows,
    }
    if not res.converged:
        click.echo(f"warning: not converged after {res.iterations_used} iterations", err=True)
    _emit(json.dumps(doc, indent=2) + "\n", out)


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in sweep_table(rows):
        writer.writerow([repr(float(r[c])) for c in SWEEP_COLUMNS])
    return buf.getvalue()


@main.command()
@_config_options
@click.option("--mode", type=click.Choice(["allocation", "joint"]), default="allocation",
              show_default=True)
@_exit_codes
def sweep(config_path, seed, tradeoff, trials, out, sets, mode):
    """Sweep the round time T and write one CSV row per value."""
    cfg = load_run_config(config_path, sets, seed, tradeoff, trials)
    extra = {"mode": mode}
    population = None if cfg.devices is None else fixed_population(cfg.devices)
    if mode == "allocation":
        rows = run_sweep_allocation(cfg.scenario, population)
    else:
        lam = (cfg.params.tradeoff if cfg.tradeoff_given
               else calibrate_tradeoff(cfg.scenario, population=population))
        extra.update(tradeoff=lam, tradeoff_source="config" if cfg.tradeoff_given else "calibrated")
        rows = run_sweep_joint(cfg.scenario, lam, cfg.joint, population)
    _emit(sweep_csv(rows), out)
    if out is not None:
        meta = manifest("sweep", cfg, **extra)
        Path(str(out) + ".manifest.json").write_text(json.dumps(meta, indent=2) + "\n")


@main.command()
@click.option("--level", type=click.Choice(["fast", "full"]), default="fast", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--inject-fault", type=click.Choice(["none", "lambertw"]), default="none",
              help="Run against deliberately broken kernels (mutation check).")
def validate(level, seed, inject_fault):
    """Run the oracle-agreement checks; exit 4 if any fails."""
    if inject_fault == "lambertw":
        with backend.use(faulty_kernels()):
            results = run_checks(level, seed)
    else:
        results = run_checks(level, seed)
    click.echo(format_table(results))
    if not all(r.passed for r in results):
        sys.exit(EXIT_VALIDATION)


if __name__ == "__main__":
    main()
