import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feelrrm.errors import DomainError
from feelrrm.model import LN2, Device, SystemParams
from feelrrm.oracle import GridSpec, oracle_p4
from feelrrm.scheduling import per_device_objective, priority, schedule_all, stationary_priority

from conftest import make_devices

P = SystemParams(bandwidth=1e6, noise=1e-8, model_size=1e4, round_time=0.1)
UNIT = P.noise * P.model_size * LN2  # lambda * h^2 at which the log term is 0


def lam_for_log2(h2, value):
    return 2.0 ** value * UNIT / h2


def test_log_term_zero_gives_zero():
    dev = Device.from_power_gain(0, 1e-4, 0.005)
    assert priority(dev, P, 0.3, tradeoff=lam_for_log2(1e-4, 0.0)) == 0.0


def test_negative_stationary_point_clamps_to_zero():
    dev = Device.from_power_gain(0, 1e-4, 0.005)
    lam = lam_for_log2(1e-4, -3.0)
    assert stationary_priority(1e-4, 0.3, 0.095, P, lam) < 0
    assert priority(dev, P, 0.3, tradeoff=lam) == 0.0


def test_large_stationary_point_clamps_to_one():
    dev = Device.from_power_gain(0, 1e-4, 0.005)  # T_k = 0.095
    lam = lam_for_log2(1e-4, 8.0)
    raw = stationary_priority(1e-4, 0.02, 0.095, P, lam)
    assert raw == pytest.approx(0.02 * 1e6 * 0.095 / 1e4 * 8, rel=1e-12)
    assert raw == pytest.approx(1.52, rel=1e-12)
    assert priority(dev, P, 0.02, tradeoff=lam) == 1.0
    b, _ = oracle_p4(dev, P, 0.02, 0.095, lam)
    assert b == 1.0


def test_interior_matches_scan():
    dev = Device.from_power_gain(0, 1e-4, 0.005)
    lam = lam_for_log2(1e-4, 3.0)
    b = priority(dev, P, 0.02, tradeoff=lam)
    assert 0 < b < 1
    ref, _ = oracle_p4(dev, P, 0.02, 0.095, lam, GridSpec(refine_passes=4))
    assert b == pytest.approx(ref, abs=1e-6)


@settings(max_examples=150, deadline=None)
@given(st.floats(1e-6, 1e-2), st.floats(0.05, 1.0), st.floats(0.002, 0.1), st.floats(-0.5, 1.5))
def test_closed_form_agrees_with_scan(h2, gamma, tk, target):
    """Choose lambda so the unclamped point is ``target``, then compare."""
    log2_term = target * P.model_size / (gamma * P.bandwidth * tk)
    lam = lam_for_log2(h2, log2_term)
    dev = Device.from_power_gain(0, h2, P.round_time - tk)
    b = priority(dev, P, gamma, t_allowed=tk, tradeoff=lam)
    assert b == pytest.approx(np.clip(target, 0, 1), abs=1e-9)
    ref, _ = oracle_p4(dev, P, gamma, tk, lam, GridSpec(refine_passes=4))
    assert b == pytest.approx(ref, abs=1e-6)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 1e-2), st.floats(0.05, 1.0), st.floats(0.002, 0.1), st.floats(-0.5, 1.5))
def test_closed_form_is_a_minimum(h2, gamma, tk, target):
    lam = lam_for_log2(h2, target * P.model_size / (gamma * P.bandwidth * tk))
    b = float(np.clip(stationary_priority(h2, gamma, tk, P, lam), 0, 1))
    grid = np.linspace(0, 1, 501)
    vals = per_device_objective(grid, h2, gamma, tk, P, lam)
    best = per_device_objective(b, h2, gamma, tk, P, lam)
    assert best <= vals.min() + 1e-12 * max(1.0, abs(vals.min()))


def test_identical_devices_get_identical_priorities():
    devs = make_devices([1e-4] * 5, [0.004] * 5)
    pr = schedule_all(devs, P, np.full(5, 0.2), tradeoff=lam_for_log2(1e-4, 2.0))
    assert np.all(pr.beta == pr.beta[0])


def test_priority_grows_with_allowed_time():
    devs = make_devices([1e-4, 1e-4], [0.001, 0.05])  # T_1 > T_2
    pr = schedule_all(devs, P, [0.05, 0.05], tradeoff=lam_for_log2(1e-4, 1.0))
    assert 0 < pr.beta[1] < pr.beta[0] < 1
    assert pr.unclamped[0] / pr.unclamped[1] == pytest.approx(0.099 / 0.05)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 1e-2), st.floats(0.01, 1.0), st.floats(1e-3, 0.1), st.floats(1e-3, 1e3),
       st.floats(1.01, 10.0))
def test_priority_monotone_in_every_input(h2, gamma, tk, lam, f):
    base = stationary_priority(h2, gamma, tk, P, lam)
    for args in [(h2 * f, gamma, tk, lam), (h2, min(1.0, gamma * f), tk, lam),
                 (h2, gamma, tk * f, lam), (h2, gamma, tk, lam * f)]:
        new = stationary_priority(*args[:3], P, args[3])
        assert np.clip(new, 0, 1) >= np.clip(base, 0, 1) - 1e-12


def test_unusable_devices_score_zero():
    pr = schedule_all(make_devices([1e-4, 0.0, 1e-4], [0.0, 0.0, 0.2]), P, [0.3, 0.3, 0.3],
                      tradeoff=1e3)
    assert pr.beta[1] == 0.0 and pr.beta[2] == 0.0 and pr.beta[0] > 0


def test_schedule_errors():
    devs = make_devices([1e-4], [0.0])
    with pytest.raises(DomainError):
        schedule_all(devs, P, [0.5, 0.5])
    with pytest.raises(DomainError):
        priority(devs[0], P, 0.5, tradeoff=0.0)
