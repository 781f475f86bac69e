"""
Deterministic graph generators.

Specs: path_N, cycle_N, complete_N, star_N (N vertices) and random_gnp_N_P.
All randomness comes from one numpy Generator, so a fixed seed always yields
the same graph.
"""
import logging
import re
from typing import Optional

import networkx as nx
import numpy as np

from scripts.config import GRAPH_CONFIG
from scripts.errors import GraphGenerationError
from scripts.graph_core import WeightedGraph

logger = logging.getLogger(__name__)

WEIGHT_MODES = ("unit", "uniform")
WEIGHT_RANGE = (0.5, 2.0)

_FAMILY = re.compile(r"^(path|cycle|complete|star)_(\d+)$")
_GNP = re.compile(r"^random_gnp_(\d+)_(0?\.\d+|1(?:\.0*)?|0)$")

_MIN_SIZE = {"path": 1, "cycle": 3, "complete": 1, "star": 2}


def _family_graph(kind: str, n: int) -> nx.Graph:
    if n < _MIN_SIZE[kind]:
        raise ValueError(f"{kind} graphs need at least {_MIN_SIZE[kind]} vertices, got {n}")
    if kind == "path":
        return nx.path_graph(n)
    if kind == "cycle":
        return nx.cycle_graph(n)
    if kind == "complete":
        return nx.complete_graph(n)
    return nx.star_graph(n - 1)


def _connected_gnp(n: int, p: float, rng: np.random.Generator, retries: int) -> nx.Graph:
    for attempt in range(1, retries + 1):
        candidate = nx.gnp_random_graph(n, p, seed=int(rng.integers(2 ** 32)))
        if nx.is_connected(candidate):
            logger.debug("random_gnp_%d_%g connected after %d attempts", n, p, attempt)
            return candidate
    raise GraphGenerationError(f"random_gnp_{n}_{p} not connected after {retries} attempts")


def generate_graph(
    spec: str,
    seed: Optional[int] = None,
    theta: str = "one",
    weights: str = "uniform",
    rng: Optional[np.random.Generator] = None,
) -> WeightedGraph:
    """
    Build a graph from a generator spec.

    Args:
        spec: Generator spec, e.g. "cycle_4" or "random_gnp_10_0.4"
        seed: Seed for a fresh generator (ignored when rng is given)
        theta: "one" for ϑ ≡ 1, "deg" for ϑ = deg
        weights: "unit" or "uniform" (ω drawn from [0.5, 2.0])
        rng: Shared generator

    Returns:
        WeightedGraph with vertices labelled v0, v1, ...

    Raises:
        ValueError: On an unknown spec or mode
        GraphGenerationError: If random_gnp stays disconnected after the retry budget
    """
    if weights not in WEIGHT_MODES:
        raise ValueError(f"Invalid weight mode: {weights}. Must be one of {WEIGHT_MODES}")
    rng = np.random.default_rng(seed) if rng is None else rng

    family = _FAMILY.match(spec)
    gnp = _GNP.match(spec)
    if family:
        base = _family_graph(family.group(1), int(family.group(2)))
    elif gnp:
        n, p = int(gnp.group(1)), float(gnp.group(2))
        if n < 1:
            raise ValueError("random_gnp needs at least one vertex")
        base = _connected_gnp(n, p, rng, GRAPH_CONFIG["connect_retries"])
    else:
        raise ValueError(
            f"Invalid generator spec: {spec}. Expected path_N, cycle_N, complete_N, star_N or random_gnp_N_P"
        )

    edges = sorted((min(a, b), max(a, b)) for a, b in base.edges())
    if weights == "unit":
        values = np.ones(len(edges))
    else:
        values = rng.uniform(*WEIGHT_RANGE, size=len(edges))
    labels = [f"v{i}" for i in range(base.number_of_nodes())]
    graph = WeightedGraph(spec, labels, np.ones(len(labels)), [(a, b, w) for (a, b), w in zip(edges, values)])
    return graph if theta == "one" else graph.with_theta(theta)
