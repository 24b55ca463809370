from pathlib import Path

import numpy as np
import pytest

from attrwalk import Graph, load_edge_list

DATA_DIR = Path(__file__).resolve().parents[1] / "data"
KARATE_PATH = DATA_DIR / "karate.edges"


@pytest.fixture(scope="session")
def karate() -> Graph:
    return load_edge_list(KARATE_PATH)


@pytest.fixture
def triangle() -> Graph:
    return Graph.from_edges([(0, 1), (1, 2), (0, 2)], num_nodes=3)


@pytest.fixture
def path3() -> Graph:
    return Graph.from_edges([(0, 1), (1, 2)], num_nodes=3)


def random_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi graph on internal indices (test helper)."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]]
    return Graph.from_edges(edges, num_nodes=n)
