import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from stribola import DEFAULT_TOL, GridFunction, canonical_knots, constant_one, solve

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def sampled(func, n=4096):
    x = canonical_knots(n)
    return GridFunction(x, func(x))


@pytest.fixture(scope="session")
def h1():
    return sampled(lambda x: 1.0 - x)


@pytest.fixture(scope="session")
def h2():
    return sampled(lambda x: (1.0 - x) ** 2)


@pytest.fixture(scope="session")
def h3():
    return sampled(lambda x: 1.0 - 3.0 * x + 2.0 * x**1.5)


@pytest.fixture(scope="session")
def one():
    return constant_one()


@pytest.fixture(scope="session")
def solved():
    return solve(tol=DEFAULT_TOL.with_(n_grid=4096), extrapolate=False)


@st.composite
def strict_functions(draw, max_knots=12):
    """Strictly decreasing piecewise-linear functions from 1 at 0 to 0 at 1."""
    k = draw(st.integers(min_value=1, max_value=max_knots))
    gaps = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=k + 1, max_size=k + 1)))
    drops = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=k + 1, max_size=k + 1)))
    x = np.concatenate([[0.0], np.cumsum(gaps) / gaps.sum()])
    v = 1.0 - np.concatenate([[0.0], np.cumsum(drops) / drops.sum()])
    x[-1], v[-1] = 1.0, 0.0
    return GridFunction(x, v)


@st.composite
def e_functions(draw, max_knots=12):
    """Members of E: decreasing from 1, possibly with plateaus, jumps and f(1) > 0."""
    k = draw(st.integers(min_value=1, max_value=max_knots))
    gaps = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=k + 1, max_size=k + 1)))
    drops = np.array(draw(st.lists(st.sampled_from([0.0, 0.1, 0.5, 1.0, 3.0]), min_size=k + 1, max_size=k + 1)))
    floor = draw(st.sampled_from([0.0, 0.0, 0.2]))
    x = np.concatenate([[0.0], np.cumsum(gaps) / gaps.sum()])
    total = drops.sum() or 1.0
    v = 1.0 - (1.0 - floor) * np.concatenate([[0.0], np.cumsum(drops) / total])
    x[-1] = 1.0
    v[0] = 1.0
    return GridFunction(x, np.clip(v, 0.0, 1.0))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
