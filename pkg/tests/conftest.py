import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

coords = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def sequences(draw, n=None, dim=None, complex_field=False):
    n = draw(st.integers(2, 8)) if n is None else n
    dim = draw(st.integers(1, 4)) if dim is None else dim
    x = draw(arrays(np.float64, (n, dim), elements=coords))
    if complex_field:
        x = x + 1j * draw(arrays(np.float64, (n, dim), elements=coords))
    return x


@st.composite
def probability_weights(draw, n):
    raw = draw(arrays(np.float64, n, elements=st.floats(0.05, 1.0)))
    return raw / raw.sum()


@st.composite
def signed_weights(draw, n, guard=1e-3):
    """Real weights whose partial and tail sums all stay away from zero."""
    p = draw(arrays(np.float64, n, elements=st.floats(-2, 2).filter(lambda v: abs(v) > 0.05)))
    P = np.cumsum(p)
    tail = P[-1] - P[:-1]
    assume(np.all(np.abs(P) > guard) and np.all(np.abs(tail) > guard))
    return p


@st.composite
def instances(draw, signed=False, complex_field=False, max_n=8):
    n = draw(st.integers(2, max_n))
    dim = draw(st.integers(1, 4))
    p = draw(signed_weights(n) if signed else probability_weights(n))
    x = draw(sequences(n, dim, complex_field))
    y = draw(sequences(n, dim, complex_field))
    return p, x, y


def random_signed(rng, n, guard=1e-6):
    while True:
        p = rng.normal(size=n)
        P = np.cumsum(p)
        if np.all(np.abs(P) > guard) and np.all(np.abs(P[-1] - P[:-1]) > guard):
            return p


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def canonical():
    """n = 2, p = (1/2, 1/2), x = y = (0, 1): T_2 = 1/4."""
    return np.array([0.5, 0.5]), np.array([[0.0], [1.0]]), np.array([[0.0], [1.0]])


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
