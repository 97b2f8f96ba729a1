import numpy as np
import pytest
from hypothesis import settings

from corecut.generators import erdos_renyi
from corecut.graph import build_graph, largest_connected_component

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def edges_graph(pairs, n=None):
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    n = int(pairs.max()) + 1 if n is None else n
    return build_graph(pairs, n)


def barbell():
    """Two triangles joined by the edge 2-3."""
    return edges_graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


def cycle(n):
    return edges_graph([(i, (i + 1) % n) for i in range(n)])


def star(leaves):
    return edges_graph([(0, i) for i in range(1, leaves + 1)])


def complete(n):
    return edges_graph([(i, j) for i in range(n) for j in range(i + 1, n)])


def random_connected(rng, n_lo=3, n_hi=14, p_lo=0.2, p_hi=0.7):
    """Random connected graph: a random spanning tree plus ER extras."""
    n = int(rng.integers(n_lo, n_hi + 1))
    order = rng.permutation(n)
    pairs = [(int(order[k]), int(order[rng.integers(0, k)])) for k in range(1, n)]
    p = rng.uniform(p_lo, p_hi)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    pairs += list(zip(iu[keep].tolist(), ju[keep].tolist()))
    return edges_graph(pairs, n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def er_host():
    g = erdos_renyi(500, 8 / 500, seed=7)
    return largest_connected_component(g)[0]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
