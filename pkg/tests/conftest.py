"""
Pytest configuration and fixtures for the graph PME verifier tests.

Provides small named graphs, a seeded random generator and a factory for
random connected weighted graphs.
"""
from pathlib import Path

import numpy as np
import pytest

from scripts.generators import generate_graph
from scripts.graph_core import WeightedGraph

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def pytest_configure(config):
    """Configure pytest markers."""
    config.addinivalue_line("markers", "unit: fast tests of a single function")
    config.addinivalue_line("markers", "integration: tests running several modules or the CLI")
    config.addinivalue_line("markers", "slow: acceptance sweeps over many random instances")


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def k2() -> WeightedGraph:
    """Single edge a-b, ϑ ≡ 1, ω = 1."""
    return WeightedGraph.from_labels("k2", {"a": 1.0, "b": 1.0}, [("a", "b", 1.0)])


@pytest.fixture
def k3() -> WeightedGraph:
    return WeightedGraph.from_labels(
        "k3", {"a": 1.0, "b": 1.0, "c": 1.0}, [("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0)]
    )


@pytest.fixture
def path3() -> WeightedGraph:
    """a - b - c with unequal weights and measures."""
    return WeightedGraph.from_labels(
        "path3", {"a": 1.0, "b": 2.0, "c": 0.5}, [("a", "b", 1.0), ("b", "c", 2.0)]
    )


@pytest.fixture
def star() -> WeightedGraph:
    """Center c with four leaves."""
    leaves = ["l1", "l2", "l3", "l4"]
    return WeightedGraph.from_labels(
        "star", {"c": 1.0, **{leaf: 1.0 for leaf in leaves}}, [("c", leaf, 1.0) for leaf in leaves]
    )


@pytest.fixture
def cycle4() -> WeightedGraph:
    labels = ["a", "b", "c", "d"]
    return WeightedGraph.from_labels(
        "cycle4", {label: 1.0 for label in labels},
        [("a", "b", 1.0), ("b", "c", 1.0), ("c", "d", 1.0), ("d", "a", 1.0)],
    )


@pytest.fixture
def two_edges() -> WeightedGraph:
    """Two disjoint edges a-b and c-d."""
    return WeightedGraph.from_labels(
        "two_edges", {"a": 1.0, "b": 1.0, "c": 1.0, "d": 1.0}, [("a", "b", 1.0), ("c", "d", 2.0)]
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def random_graph(rng):
    """
    Factory for random connected graphs.

    Draws a family and size, weights uniform in [0.5, 2] and the requested
    vertex measure, all from the test's seeded generator.
    """

    def make(max_n: int = 30, theta: str = "one") -> WeightedGraph:
        n = int(rng.integers(2, max_n + 1))
        family = rng.choice(["path", "cycle", "complete", "star", "gnp"])
        if family == "gnp":
            spec = f"random_gnp_{n}_0.4"
        elif family == "cycle" and n < 3:
            spec = "path_2"
        else:
            spec = f"{family}_{n}"
        return generate_graph(spec, theta=theta, weights="uniform", rng=rng)

    return make
