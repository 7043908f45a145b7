import numpy as np
import pytest

from feelrrm import backend
from feelrrm.model import Device, SystemParams


@pytest.fixture(params=["numba", "numpy"])
def kernels(request):
    """Run a test once per kernel backend."""
    with backend.use(request.param):
        yield backend.kernels


@pytest.fixture
def sec5_params():
    return SystemParams(bandwidth=1e6, noise=1e-8, model_size=1e4, round_time=0.1)


def make_devices(power_gains, compute_times):
    return [Device.from_power_gain(i, g, t) for i, (g, t) in enumerate(zip(power_gains, compute_times))]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``criterion(n, passed, detail)`` records one acceptance line, then asserts."""
    def record(num: int, passed: bool, detail: str):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {num:>2}: {detail}"
        _CRITERIA[num] = line
        print(line)
        assert passed, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for num in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[num])
