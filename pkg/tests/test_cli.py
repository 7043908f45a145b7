import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from feelrrm.cli import EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_VALIDATION, SWEEP_COLUMNS, main
from feelrrm.config import apply_override, digest, dump, load_raw, resolve
from feelrrm.errors import ConfigError

ROOT = Path(__file__).resolve().parents[1]
DATA = Path(__file__).parent / "data"
DEFAULT = ROOT / "configs" / "default.yaml"


@pytest.fixture
def runner():
    return CliRunner()


def write_yaml(tmp_path, doc, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(doc))
    return str(p)


def invoke(runner, *args):
    return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)


def test_single_device_gets_whole_band(runner, tmp_path):
    cfg = write_yaml(tmp_path, {"devices": [{"power_gain": 1e-4, "compute_time": 0.005}]})
    res = invoke(runner, "allocate", "--config", cfg)
    assert res.exit_code == 0, res.output
    doc = json.loads(res.output)
    assert len(doc["devices"]) == 1
    assert doc["devices"][0]["gamma"] == 1.0
    assert doc["devices"][0]["upload_time"] == pytest.approx(0.015)


@pytest.mark.parametrize("text", ["system: [1, 2", "system: {bandwidth: -1}", "foo: {}",
                                  "system: {bandwdith: 1}", "devices: [{compute_time: 0}]"])
def test_malformed_config_exits_2(runner, tmp_path, text):
    p = tmp_path / "bad.yaml"
    p.write_text(text)
    res = runner.invoke(main, ["allocate", "--config", str(p)])
    assert res.exit_code == EXIT_CONFIG


def test_missing_config_exits_2(runner, tmp_path):
    res = runner.invoke(main, ["allocate", "--config", str(tmp_path / "nope.yaml")])
    assert res.exit_code == EXIT_CONFIG


def test_infeasible_schedule_exits_3(runner, tmp_path):
    cfg = write_yaml(tmp_path, {"system": {"round_time": 0.01},
                                "devices": [{"power_gain": 1e-4, "compute_time": 0.02}]})
    res = runner.invoke(main, ["allocate", "--config", cfg])
    assert res.exit_code == EXIT_INFEASIBLE


def test_golden_allocation(runner):
    res = invoke(runner, "allocate", "--config", DEFAULT, "--seed", 7)
    assert res.exit_code == 0
    got = json.loads(res.output)
    want = json.loads((DATA / "allocate_default_seed7.json").read_text())
    assert got["manifest"]["seed"] == 7
    assert got["dual_iterations"] == want["dual_iterations"]
    assert got["log_nu_star"] == pytest.approx(want["log_nu_star"], rel=1e-10)
    for g, w in zip(got["devices"], want["devices"], strict=True):
        for key, val in w.items():
            assert g[key] == pytest.approx(val, rel=1e-10), (w["id"], key)
    for key, val in want["totals"].items():
        assert got["totals"][key] == pytest.approx(val, rel=1e-10)


def test_golden_sweep(runner, tmp_path):
    out = tmp_path / "sweep.csv"
    res = invoke(runner, "sweep", "--config", DEFAULT, "--seed", 7, "--trials", 3, "--out", out)
    assert res.exit_code == 0
    got = np.loadtxt(out, delimiter=",", skiprows=1)
    want = np.loadtxt(DATA / "sweep_alloc_seed7_trials3.csv", delimiter=",", skiprows=1)
    np.testing.assert_allclose(got, want, rtol=1e-10)


def test_sweep_manifest(runner, tmp_path):
    out = tmp_path / "s.csv"
    invoke(runner, "sweep", "--seed", 2, "--trials", 2, "--out", out,
           "--set", "scenario.num_devices=5")
    meta = json.loads(Path(str(out) + ".manifest.json").read_text())
    assert meta["command"] == "sweep" and meta["seed"] == 2 and meta["mode"] == "allocation"
    assert meta["resolved_config"]["scenario"]["num_devices"] == 5
    assert meta["config_digest"] == digest(meta["resolved_config"])
    for key in ("tool_version", "timestamp", "backend"):
        assert key in meta


def test_sweep_is_bit_identical(runner, tmp_path):
    args = ["sweep", "--seed", 11, "--trials", 3, "--set", "scenario.num_devices=10"]
    a = invoke(runner, *args).output
    b = invoke(runner, *args).output
    assert a == b
    header = next(csv.reader(io.StringIO(a)))
    assert tuple(header) == SWEEP_COLUMNS


def test_joint_sweep_is_bit_identical(runner):
    args = ["sweep", "--mode", "joint", "--seed", 4, "--trials", 2,
            "--set", "scenario.num_devices=8", "--set", "scenario.t_sweep=[0.015,0.03]"]
    a = invoke(runner, *args)
    assert a.exit_code == 0
    assert a.output == invoke(runner, *args).output


def test_identical_devices_policies_coincide(runner, tmp_path):
    dev = {"power_gain": 1e-4, "compute_time": 0.004}
    cfg = write_yaml(tmp_path, {"devices": [dev] * 3, "scenario": {"t_sweep": [0.012, 0.02]}})
    res = invoke(runner, "sweep", "--config", cfg, "--trials", 1)
    rows = list(csv.DictReader(io.StringIO(res.output)))
    assert len(rows) == 2
    for r in rows:
        assert float(r["energy_proposed"]) == pytest.approx(float(r["energy_baseline"]), rel=1e-12)


def test_joint_extremes(runner, tmp_path):
    devs = [{"power_gain": g, "compute_time": 0.003} for g in (1e-4, 5e-5, 2e-4)]
    none = write_yaml(tmp_path, {"devices": devs, "system": {"tradeoff": 1e-9}}, "a.yaml")
    doc = json.loads(invoke(runner, "joint", "--config", none).output)
    assert doc["scheduled_count"] == 0 and doc["objective"] == 0.0

    every = write_yaml(tmp_path, {"devices": devs, "system": {"tradeoff": 1e9}}, "b.yaml")
    doc = json.loads(invoke(runner, "joint", "--config", every).output)
    assert doc["scheduled_count"] == 3
    alloc = json.loads(invoke(runner, "allocate", "--config", every).output)
    got = [d["gamma"] for d in doc["devices"]]
    want = [d["gamma"] for d in alloc["devices"]]
    np.testing.assert_allclose(got, want, rtol=1e-12)


def test_joint_two_devices_example(runner):
    doc = json.loads(invoke(runner, "joint", "--config", ROOT / "configs" / "two_devices.yaml").output)
    assert doc["manifest"]["tradeoff_source"] == "config"
    assert doc["converged"]
    assert doc["objective"] == pytest.approx(doc["upload_energy"] - 2000.0 * doc["scheduled_count"])


def test_schedule_command_calibrates(runner):
    res = invoke(runner, "schedule", "--set", "scenario.num_devices=6")
    doc = json.loads(res.output)
    assert doc["manifest"]["tradeoff_source"] == "calibrated"
    assert all(0 <= d["priority"] <= 1 for d in doc["devices"])


def test_validate_fast_and_fault(runner):
    ok = runner.invoke(main, ["validate", "--level", "fast"])
    assert ok.exit_code == 0, ok.output
    assert ok.output.count("PASS") == 5
    bad = runner.invoke(main, ["validate", "--inject-fault", "lambertw"])
    assert bad.exit_code == EXIT_VALIDATION
    assert "FAIL" in bad.output


def test_config_round_trip():
    cfg = resolve(load_raw(DEFAULT))
    assert resolve(dump(cfg)) == cfg
    assert not cfg.tradeoff_given
    two = resolve(load_raw(ROOT / "configs" / "two_devices.yaml"))
    assert resolve(dump(two)).devices == two.devices


def test_override_parsing():
    raw = apply_override({}, "scenario.t_sweep=[0.02, 0.04]")
    assert resolve(raw).scenario.t_sweep == (0.02, 0.04)
    for bad in ["scenario", "a.b.c=1", "scenario.trials=[1"]:
        with pytest.raises(ConfigError):
            apply_override({}, bad)
