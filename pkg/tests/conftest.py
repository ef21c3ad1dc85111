import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from hypersparse.hypergraph import Hypergraph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# the small hypergraph used throughout: three edges chained by shared nodes
CHAIN_EDGES = [[0, 1, 2], [2, 3, 4], [4, 5, 6]]


@pytest.fixture
def chain():
    return Hypergraph.from_edges(7, CHAIN_EDGES)


@st.composite
def hypergraphs(draw, max_n=10, max_m=5, max_size=5):
    n = draw(st.integers(2, max_n))
    m = draw(st.integers(1, max_m))
    edges = []
    for _ in range(m):
        size = draw(st.integers(2, min(max_size, n)))
        edges.append(draw(st.lists(st.integers(0, n - 1), min_size=size, max_size=size, unique=True)))
    return Hypergraph.from_edges(n, edges)


def finite(lo=-5.0, hi=5.0):
    return st.floats(lo, hi, allow_nan=False, allow_infinity=False)


def random_instance(rng, n_max=12, m_max=4, size_max=5):
    n = int(rng.integers(4, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    edges = [sorted(rng.choice(n, size=int(rng.integers(2, min(size_max, n) + 1)),
                               replace=False).tolist()) for _ in range(m)]
    return n, edges


# -- acceptance reporting -----------------------------------------------------

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per criterion; printed now and in the summary."""
    def record(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
