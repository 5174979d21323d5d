import numpy as np
import pytest

from gbskernel.graphcore import ScaledGraph, validate_graph
from gbskernel.synthetic import random_graph


def complete(n):
    return validate_graph(np.ones((n, n)) - np.eye(n))


def path(n):
    a = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = 1
    return validate_graph(a)


def cycle(n):
    a = np.zeros((n, n))
    for i in range(n):
        a[i, (i + 1) % n] = a[(i + 1) % n, i] = 1
    return validate_graph(a)


def scaled(g, c=None):
    if c is None:
        c = 0.9 / max(g.spectral_norm(), 1e-12)
        c = min(c, 1.0)
    return ScaledGraph(g, c)


@pytest.fixture
def k3():
    return complete(3)


@pytest.fixture
def k2_half():
    return ScaledGraph(complete(2), 0.5)


@pytest.fixture(scope="session")
def random_graphs():
    """Twenty seeded random graphs with 5..10 nodes, each scaled to c * s_max = 0.7."""
    out = []
    for seed in range(20):
        n = 5 + seed % 6
        g = random_graph(n, 0.5, seed)
        out.append(scaled(g, 0.7 / g.spectral_norm() if g.num_edges else 1.0))
    return out


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
