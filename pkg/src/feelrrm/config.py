"""YAML run configuration: parsing, dotted-path overrides, canonical dumps.

Layout (every section optional, SI units)::

    system:   {bandwidth, noise, model_size, round_time, tradeoff, compute_energy}
    scenario: {num_devices, path_loss, compute_time_range, t_sweep, trials, rng_seed}
    joint:    {max_iters, convergence_tol, rounding_threshold, init_mode}
    devices:  [{channel_gain | power_gain, compute_time, beta}, ...]

Leaving ``system.tradeoff`` out means "calibrate it" for the joint commands.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError, RRMError
from .joint import JointConfig
from .model import Device, SystemParams
from .sim import ScenarioConfig, generate_population

_SYSTEM_KEYS = {f.name for f in fields(SystemParams)}
_SCENARIO_KEYS = {"num_devices", "path_loss", "compute_time_range", "t_sweep", "trials", "rng_seed"}
_JOINT_KEYS = {"max_iters", "convergence_tol", "rounding_threshold", "init_mode"}
_DEVICE_KEYS = {"channel_gain", "power_gain", "compute_time", "beta"}
_SECTIONS = {"system": _SYSTEM_KEYS, "scenario": _SCENARIO_KEYS, "joint": _JOINT_KEYS}


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    scenario: ScenarioConfig
    joint: JointConfig
    tradeoff_given: bool
    devices: tuple[Device, ...] | None = None
    device_beta: tuple[float, ...] | None = None

    def population(self) -> list[Device]:
        """Explicit devices if configured, else trial 0 of the scenario."""
        if self.devices is not None:
            return list(self.devices)
        return generate_population(self.scenario, 0)

    def schedule(self) -> list[float]:
        if self.device_beta is not None:
            return list(self.device_beta)
        return [1.0] * len(self.population())


def load_raw(path: str | Path | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    return raw


def apply_override(raw: dict, assignment: str) -> dict:
    """Apply ``section.key=value`` (value parsed as YAML) to a copy of ``raw``."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form section.key=value")
    path, _, text = assignment.partition("=")
    parts = path.strip().split(".")
    if len(parts) != 2:
        raise ConfigError(f"override path {path!r} must be section.key")
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse override value {text!r}") from exc
    out = copy.deepcopy(raw)
    section = out.setdefault(parts[0], {})
    if not isinstance(section, dict):
        raise ConfigError(f"section {parts[0]!r} is not a mapping")
    section[parts[1]] = value
    return out


def _section(raw: dict, name: str) -> dict:
    sec = raw.get(name) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    unknown = set(sec) - _SECTIONS[name]
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    return sec


def _devices(raw: dict) -> tuple[tuple[Device, ...] | None, tuple[float, ...] | None]:
    items = raw.get("devices")
    if items is None:
        return None, None
    if not isinstance(items, list) or not items:
        raise ConfigError("devices must be a non-empty list")
    devs, betas = [], []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise ConfigError(f"device {i} must be a mapping")
        unknown = set(item) - _DEVICE_KEYS
        if unknown:
            raise ConfigError(f"unknown keys in device {i}: {sorted(unknown)}")
        if ("channel_gain" in item) == ("power_gain" in item):
            raise ConfigError(f"device {i} needs exactly one of channel_gain / power_gain")
        if "compute_time" not in item:
            raise ConfigError(f"device {i} is missing compute_time")
        try:
            if "power_gain" in item:
                dev = Device.from_power_gain(i, float(item["power_gain"]), float(item["compute_time"]))
            else:
                dev = Device(i, float(item["channel_gain"]), float(item["compute_time"]))
            betas.append(float(item.get("beta", 1.0)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"device {i}: {exc}") from exc
        devs.append(dev)
    return tuple(devs), tuple(betas)


def resolve(raw: dict) -> RunConfig:
    unknown = set(raw) - set(_SECTIONS) - {"devices"}
    if unknown:
        raise ConfigError(f"unknown top-level sections: {sorted(unknown)}")
    system = _section(raw, "system")
    scenario = _section(raw, "scenario")
    joint = _section(raw, "joint")
    try:
        params = SystemParams(**{k: float(v) for k, v in system.items()})
        sc = dict(scenario)
        if "compute_time_range" in sc:
            lo, hi = sc["compute_time_range"]
            sc["compute_time_range"] = (float(lo), float(hi))
        if "t_sweep" in sc:
            sc["t_sweep"] = tuple(float(t) for t in sc["t_sweep"])
        for key in ("num_devices", "trials", "rng_seed"):
            if key in sc:
                sc[key] = int(sc[key])
        scen = ScenarioConfig(params=params, **sc)
        jc = JointConfig(rng_seed=scen.rng_seed, **joint)
        devices, betas = _devices(raw)
    except ConfigError:
        raise
    except (RRMError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(params, scen, jc, "tradeoff" in system, devices, betas)


def with_overrides(cfg: RunConfig, *, seed: int | None = None, tradeoff: float | None = None,
                   trials: int | None = None) -> RunConfig:
    """Apply the dedicated command-line flags (they beat file values)."""
    try:
        if tradeoff is not None:
            params = replace(cfg.params, tradeoff=float(tradeoff))
            cfg = replace(cfg, params=params, scenario=replace(cfg.scenario, params=params),
                          tradeoff_given=True)
        if seed is not None:
            cfg = replace(cfg, scenario=replace(cfg.scenario, rng_seed=int(seed)),
                          joint=replace(cfg.joint, rng_seed=int(seed)))
        if trials is not None:
            cfg = replace(cfg, scenario=replace(cfg.scenario, trials=int(trials)))
    except (RRMError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def dump(cfg: RunConfig) -> dict[str, Any]:
    """Canonical dict form; ``resolve(dump(cfg)) == cfg``."""
    system = {f.name: getattr(cfg.params, f.name) for f in fields(SystemParams)}
    if not cfg.tradeoff_given:
        del system["tradeoff"]
    sc = cfg.scenario
    out: dict[str, Any] = {
        "system": system,
        "scenario": {
            "num_devices": sc.num_devices,
            "path_loss": sc.path_loss,
            "compute_time_range": list(sc.compute_time_range),
            "t_sweep": list(sc.t_sweep),
            "trials": sc.trials,
            "rng_seed": sc.rng_seed,
        },
        "joint": {
            "max_iters": cfg.joint.max_iters,
            "convergence_tol": cfg.joint.convergence_tol,
            "rounding_threshold": cfg.joint.rounding_threshold,
            "init_mode": cfg.joint.init_mode,
        },
    }
    if cfg.devices is not None:
        out["devices"] = [
            {"channel_gain": d.channel_gain, "compute_time": d.compute_time, "beta": b}
            for d, b in zip(cfg.devices, cfg.device_beta)
        ]
    return out


def digest(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
