import numpy as np
import pytest
from hypothesis import strategies as st

from tsembed.timescale import TimeScale

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@st.composite
def scales(draw, min_points=3, max_points=30, mu_min=0.01, mu_max=1.0):
    n = draw(st.integers(min_points, max_points))
    gaps = draw(st.lists(st.floats(mu_min, mu_max), min_size=n - 1, max_size=n - 1))
    a = draw(st.floats(-10, 10))
    return TimeScale(a + np.concatenate(([0.0], np.cumsum(gaps))))


def random_scale(rng, n, mu_min=0.01, mu_max=1.0):
    gaps = rng.uniform(mu_min, mu_max, size=n - 1)
    return TimeScale(rng.uniform(-5, 5) + np.concatenate(([0.0], np.cumsum(gaps))))


# -- brute-force oracles: plain Python loops over point lists ---------------

def oracle_forward_diff(points, f):
    return [(f[k + 1] - f[k]) / (points[k + 1] - points[k]) for k in range(len(points) - 1)]


def oracle_sum(points, f, c, d):
    total = 0.0
    for k in range(c, d):
        total += (points[k + 1] - points[k]) * f[k]
    return total


def oracle_action(points, lag, x):
    total = 0.0
    for k in range(len(points) - 1):
        h = points[k + 1] - points[k]
        total += h * float(lag.eval(points[k], x[k], (x[k + 1] - x[k]) / h))
    return total


def oracle_fd_gradient(points, lag, x, step=1e-5):
    """Central differences of the action in each interior value."""
    x = list(map(float, x))
    grad = []
    for k in range(1, len(x) - 1):
        xp, xm = list(x), list(x)
        xp[k] += step
        xm[k] -= step
        grad.append((oracle_action(points, lag, xp) - oracle_action(points, lag, xm)) / (2 * step))
    return grad
