import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feelrrm import backend
from feelrrm.errors import BracketError, DomainError
from feelrrm.numerics import RootBracket, bisect_decreasing, lambert_w0, lambert_w0_array


def fixed_point_w(x, tol=1e-14):
    """W(x) for x > 0 by iterating w = x e^{-w} (independent of Halley)."""
    w = 0.5
    for _ in range(10_000):
        nxt = x * math.exp(-w)
        if abs(nxt - w) < tol:
            return nxt
        w = 0.5 * (w + nxt)  # damped: plain iteration oscillates for x > e
    raise RuntimeError("no convergence")


def test_w_trivial_points(kernels):
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-15)
    assert lambert_w0(-1.0 / math.e) == pytest.approx(-1.0, abs=1e-8)


def test_w_of_one_matches_fixed_point(kernels):
    ref = fixed_point_w(1.0)
    assert ref == pytest.approx(0.5671432904097838, abs=1e-12)
    assert lambert_w0(1.0) == pytest.approx(ref, abs=1e-12)


def test_w_domain_error(kernels):
    with pytest.raises(DomainError):
        lambert_w0(-0.5)
    with pytest.raises(DomainError):
        lambert_w0_array(np.array([0.1, -1.0]))


@pytest.mark.parametrize("x", [1e-300, 1e-8, 0.3, 2.0, 10.0, 1e3, 1e100, 1e300])
def test_w_against_mpmath(kernels, x):
    ref = float(mpmath.lambertw(x).real)
    assert lambert_w0(x) == pytest.approx(ref, rel=1e-14)


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=-1.0 / math.e, max_value=1e6, allow_nan=False))
def test_w_residual_property(x):
    w = lambert_w0(x)
    assert w >= -1.0
    assert abs(w * math.exp(w) - x) <= 1e-10 * max(abs(x), 1e-300) + 1e-16


def test_w_monotone_on_grid():
    x = np.concatenate([-1 / math.e + np.logspace(-15, -0.5, 2000), np.logspace(-5, 6, 2000)])
    x.sort()
    assert np.all(np.diff(lambert_w0_array(x)) >= 0)


def test_wp1_log_near_branch_and_overflow(kernels):
    mpmath.mp.dps = 60
    for t in [-200.0, -40.0, -12.0, -3.0, 0.0, 5.0, 650.0, 800.0, 5000.0]:
        z = (mpmath.e ** mpmath.mpf(t) - 1) / mpmath.e
        ref = float(1 + mpmath.lambertw(z).real)
        got = float(kernels.wp1_log(np.array([t]))[0])
        assert got == pytest.approx(ref, rel=1e-12), t
    mpmath.mp.dps = 15
    assert kernels.wp1_log(np.array([-np.inf]))[0] == 0.0


def test_backends_agree():
    nb, npk = backend.get("numba"), backend.get("numpy")
    x = np.concatenate([-1 / math.e + np.logspace(-14, 0, 500), np.logspace(-8, 12, 500)])
    np.testing.assert_allclose(nb.lambertw0(x), npk.lambertw0(x), rtol=1e-14, atol=1e-300)
    t = np.linspace(-60, 900, 777)
    np.testing.assert_allclose(nb.wp1_log(t), npk.wp1_log(t), rtol=1e-13)


# --- bisection ---

def test_bisect_linear():
    assert bisect_decreasing(lambda x: 1 - x, RootBracket(0, 2)) == pytest.approx(1, abs=1e-10)


def test_bisect_log2():
    root = bisect_decreasing(lambda x: 2 - math.exp(x), RootBracket(0, 2, tol=1e-12))
    assert root == pytest.approx(math.log(2), abs=1e-11)


def test_bisect_no_sign_change():
    with pytest.raises(BracketError):
        bisect_decreasing(lambda x: 1 - x, RootBracket(2, 3))


def test_bisect_expands_bracket():
    root = bisect_decreasing(lambda x: 1000 - x, RootBracket(0, 1, tol=1e-9))
    assert root == pytest.approx(1000, abs=1e-8)


def test_bisect_expansion_cap():
    with pytest.raises(BracketError):
        bisect_decreasing(lambda x: 1.0, RootBracket(0, 1))


def test_bracket_invariants():
    with pytest.raises(BracketError):
        RootBracket(1, 1)
    with pytest.raises(BracketError):
        RootBracket(0, 1, tol=0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 10), st.floats(-5, 5), st.sampled_from([1, 3, 5]))
def test_bisect_random_monotone(slope, root, power):
    def f(x):
        return -slope * (x - root) ** power

    tol = 1e-9
    x = bisect_decreasing(f, RootBracket(root - 7.3, root + 3.1, tol=tol))
    assert abs(f(x)) <= tol or abs(x - root) <= tol


def test_bisect_deterministic():
    f = lambda x: math.cos(x) - x  # noqa: E731
    assert bisect_decreasing(f, RootBracket(0, 1)) == bisect_decreasing(f, RootBracket(0, 1))
