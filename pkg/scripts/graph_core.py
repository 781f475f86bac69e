"""
Weighted graph model for the graph PME verifier.

Holds the vertex measure ϑ, the symmetric edge weights ω, the derived graph
constants (deg, D_ω, D_ϑ, ω_min, ϑ_max), hop distances, shortest-path
enumeration over the BFS layer DAG, and metric balls.

Vertices are string labels in documents and dense integer indices internally.
Every method accepting a vertex takes either form.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, shortest_path

from scripts.config import GRAPH_CONFIG
from scripts.errors import DisconnectedError, FieldError, GraphValidationError

logger = logging.getLogger(__name__)

Vertex = Union[str, int]


@dataclass(frozen=True)
class GraphConstants:
    """Scalars derived from a weighted graph."""

    degree: np.ndarray
    d_omega: float
    d_theta: float
    omega_min: float
    theta_max: float


@dataclass(frozen=True)
class PathEnumeration:
    """Shortest paths between two vertices, in lexicographic index order."""

    paths: Tuple[Tuple[int, ...], ...]
    labels: Tuple[Tuple[str, ...], ...]
    truncated: bool

    @property
    def length(self) -> int:
        """Hop count shared by every enumerated path."""
        return len(self.paths[0]) - 1


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class WeightedGraph:
    """
    Finite undirected graph with vertex measure ϑ and edge weights ω.

    The graph is immutable after construction and safe to share between workers.
    """

    def __init__(
        self,
        name: str,
        labels: Sequence[str],
        theta: Sequence[float],
        edges: Iterable[Tuple[int, int, float]],
    ):
        """
        Build and validate a graph.

        Args:
            name: Graph name (document header)
            labels: Vertex labels in index order
            theta: Vertex measures ϑ(x), aligned to labels
            edges: (i, j, ω_ij) triples over vertex indices, each edge once

        Raises:
            GraphValidationError: On duplicate labels, non-positive measures or
                weights, self-loops, duplicate edges or out-of-range indices
        """
        self.name = name
        self.labels: Tuple[str, ...] = tuple(labels)
        self._index: Dict[str, int] = {}
        for i, label in enumerate(self.labels):
            if label in self._index:
                raise GraphValidationError(f"duplicate vertex label '{label}'")
            self._index[label] = i

        n = len(self.labels)
        theta_arr = np.asarray(theta, dtype=float)
        if theta_arr.shape != (n,):
            raise GraphValidationError(f"expected {n} vertex measures, got {theta_arr.shape}")
        if not np.all(np.isfinite(theta_arr)) or np.any(theta_arr <= 0):
            bad = self.labels[int(np.argmin(np.where(np.isfinite(theta_arr), theta_arr, -np.inf)))]
            raise GraphValidationError(f"non-positive vertex measure at '{bad}'")
        self.theta = _readonly(theta_arr)

        seen = {}
        for i, j, w in edges:
            i, j, w = int(i), int(j), float(w)
            if not (0 <= i < n and 0 <= j < n):
                raise GraphValidationError(f"edge ({i}, {j}) references an unknown vertex")
            if i == j:
                raise GraphValidationError(f"self-loop at '{self.labels[i]}'")
            if not math.isfinite(w) or w <= 0:
                raise GraphValidationError(
                    f"non-positive edge weight {w} on {self.labels[i]}-{self.labels[j]}"
                )
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphValidationError(
                    f"duplicate edge {self.labels[key[0]]}-{self.labels[key[1]]}"
                )
            seen[key] = w
        self.edges: Tuple[Tuple[int, int, float], ...] = tuple(
            (i, j, w) for (i, j), w in sorted(seen.items())
        )

        rows = [i for i, j, _ in self.edges] + [j for i, j, _ in self.edges]
        cols = [j for i, j, _ in self.edges] + [i for i, j, _ in self.edges]
        vals = [w for _, _, w in self.edges] * 2
        self.weights = sp.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=float)
        self.edge_i = _readonly(np.array([i for i, _, _ in self.edges], dtype=int))
        self.edge_j = _readonly(np.array([j for _, j, _ in self.edges], dtype=int))
        self.edge_w = _readonly(np.array([w for _, _, w in self.edges], dtype=float))
        self.degree = _readonly(np.asarray(self.weights.sum(axis=1), dtype=float).ravel())

        neighbors: List[List[int]] = [[] for _ in range(n)]
        for i, j, _ in self.edges:
            neighbors[i].append(j)
            neighbors[j].append(i)
        self.neighbors: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(nb)) for nb in neighbors)

        if n:
            n_components, component = connected_components(self.weights, directed=False)
        else:
            n_components, component = 0, np.zeros(0, dtype=int)
        self.n_components = int(n_components)
        self.component = _readonly(np.asarray(component))
        self._bfs: Dict[int, np.ndarray] = {}
        self._constants: Optional[GraphConstants] = None

    @classmethod
    def from_labels(
        cls,
        name: str,
        theta: Dict[str, float],
        edges: Iterable[Tuple[str, str, float]],
    ) -> "WeightedGraph":
        """Build a graph from a label → ϑ mapping and labelled edge triples."""
        labels = list(theta)
        index = {label: i for i, label in enumerate(labels)}
        indexed = []
        for a, b, w in edges:
            if a not in index or b not in index:
                raise GraphValidationError(f"edge {a}-{b} references an unknown vertex")
            indexed.append((index[a], index[b], w))
        return cls(name, labels, [theta[label] for label in labels], indexed)

    def __repr__(self) -> str:
        return f"WeightedGraph(name={self.name!r}, n={self.n}, edges={len(self.edges)})"

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def is_connected(self) -> bool:
        return self.n_components == 1

    @property
    def total_measure(self) -> float:
        return float(self.theta.sum())

    def vertex_index(self, vertex: Vertex) -> int:
        """Resolve a label or index to an index."""
        if isinstance(vertex, (int, np.integer)) and not isinstance(vertex, bool):
            if not 0 <= int(vertex) < self.n:
                raise KeyError(f"vertex index {vertex} out of range")
            return int(vertex)
        try:
            return self._index[vertex]
        except KeyError:
            raise KeyError(f"unknown vertex '{vertex}'") from None

    def weight(self, x: Vertex, y: Vertex) -> float:
        """ω_xy, or 0 when x and y are not adjacent."""
        return float(self.weights[self.vertex_index(x), self.vertex_index(y)])

    def dense_weights(self) -> np.ndarray:
        return self.weights.toarray()

    def field(self, values: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        """Validate and return a vertex field aligned to this graph."""
        arr = np.asarray(values, dtype=float)
        if arr.shape != (self.n,):
            raise FieldError(f"field has shape {arr.shape}, graph has {self.n} vertices")
        return arr

    def field_from_labels(self, mapping: Dict[str, float], default: Optional[float] = None) -> np.ndarray:
        """Align a label-keyed mapping to vertex order."""
        values = []
        for label in self.labels:
            if label in mapping:
                values.append(float(mapping[label]))
            elif default is not None:
                values.append(float(default))
            else:
                raise FieldError(f"no value for vertex '{label}'")
        unknown = set(mapping) - set(self._index)
        if unknown:
            raise FieldError(f"values for unknown vertices: {', '.join(sorted(unknown))}")
        return np.asarray(values, dtype=float)

    def field_to_labels(self, values: np.ndarray) -> Dict[str, float]:
        return {label: float(v) for label, v in zip(self.labels, self.field(values))}

    def constants(self) -> GraphConstants:
        """deg, D_ω, D_ϑ, ω_min and ϑ_max, computed once."""
        if self._constants is None:
            deg = self.degree
            if self.edges:
                omega_min = min(w for _, _, w in self.edges)
                d_omega = max(max(deg[i], deg[j]) / w for i, j, w in self.edges)
            else:
                omega_min = math.inf
                d_omega = 0.0
            d_theta = float(np.max(deg / self.theta)) if self.n else 0.0
            self._constants = GraphConstants(
                degree=deg,
                d_omega=float(d_omega),
                d_theta=d_theta,
                omega_min=float(omega_min),
                theta_max=float(np.max(self.theta)) if self.n else 0.0,
            )
        return self._constants

    def distances_from(self, x: Vertex) -> np.ndarray:
        """Hop distances from x to every vertex; math.inf when unreachable."""
        source = self.vertex_index(x)
        cached = self._bfs.get(source)
        if cached is not None:
            return cached

        dist = shortest_path(self.weights, method="D", directed=False, unweighted=True, indices=source)
        self._bfs[source] = _readonly(np.asarray(dist, dtype=float))
        return self._bfs[source]

    def distance(self, x: Vertex, y: Vertex) -> float:
        """Unweighted shortest-path length; math.inf for disconnected pairs."""
        d = self.distances_from(x)[self.vertex_index(y)]
        return d if d == math.inf else int(d)

    def diameter(self) -> float:
        if not self.is_connected:
            return math.inf
        return int(max(np.max(self.distances_from(x)) for x in range(self.n)))

    def _layer_walk(self, source: int, target: int) -> Iterator[Tuple[int, ...]]:
        dist_s = self.distances_from(source)
        dist_t = self.distances_from(target)
        stack = [(source, (source,))]
        while stack:
            v, path = stack.pop()
            if v == target:
                yield path
                continue
            step = [
                w for w in self.neighbors[v]
                if dist_s[w] == dist_s[v] + 1 and dist_t[w] == dist_t[v] - 1
            ]
            # reversed so the smallest index is expanded first
            for w in reversed(step):
                stack.append((w, path + (w,)))

    def shortest_paths(self, x: Vertex, y: Vertex, cap: Optional[int] = None) -> PathEnumeration:
        """
        Enumerate shortest paths from x to y on the BFS layer DAG.

        Args:
            x: Start vertex
            y: End vertex
            cap: Maximum number of paths (default GRAPH_CONFIG["path_cap"])

        Returns:
            PathEnumeration in lexicographic vertex-index order, with
            truncated=True when more than cap paths exist

        Raises:
            DisconnectedError: If x and y lie in different components
            ValueError: If cap < 1
        """
        cap = GRAPH_CONFIG["path_cap"] if cap is None else int(cap)
        if cap < 1:
            raise ValueError(f"path cap must be >= 1, got {cap}")
        source, target = self.vertex_index(x), self.vertex_index(y)
        if self.distances_from(source)[target] == math.inf:
            raise DisconnectedError(
                f"'{self.labels[source]}' and '{self.labels[target]}' are not connected"
            )

        found = list(itertools.islice(self._layer_walk(source, target), cap + 1))
        truncated = len(found) > cap
        if truncated:
            logger.warning(
                "shortest path enumeration %s->%s truncated at %d paths",
                self.labels[source], self.labels[target], cap,
            )
            found = found[:cap]
        return PathEnumeration(
            paths=tuple(found),
            labels=tuple(tuple(self.labels[v] for v in path) for path in found),
            truncated=truncated,
        )

    def ball_volume(self, x: Vertex, r: float) -> float:
        """Σ ϑ(z) over dist(x, z) ≤ r; 0.0 for negative r."""
        dist = self.distances_from(x)
        return float(self.theta[dist <= r].sum())

    def with_theta(self, mode: str) -> "WeightedGraph":
        """
        Copy of the graph with ϑ ≡ 1 ("one") or ϑ = deg ("deg").

        Raises:
            ValueError: On an unknown mode, or "deg" with an isolated vertex
        """
        if mode == "one":
            theta = np.ones(self.n)
        elif mode == "deg":
            if np.any(self.degree <= 0):
                raise GraphValidationError("theta=deg requires every vertex to have an edge")
            theta = self.degree.copy()
        else:
            raise ValueError(f"Invalid theta mode: {mode}. Must be 'one' or 'deg'")
        return WeightedGraph(self.name, self.labels, theta, self.edges)

    def theta_is_degree(self, rtol: float = 1e-12) -> bool:
        return bool(np.allclose(self.theta, self.degree, rtol=rtol, atol=0.0))


def check_positive(u: np.ndarray, floor: float = 0.0) -> bool:
    """True when every entry of the field exceeds floor."""
    return bool(np.all(np.asarray(u) > floor))


def constants(g: WeightedGraph) -> GraphConstants:
    return g.constants()


def distance(g: WeightedGraph, x: Vertex, y: Vertex) -> float:
    return g.distance(x, y)


def shortest_paths(g: WeightedGraph, x: Vertex, y: Vertex, cap: Optional[int] = None) -> PathEnumeration:
    return g.shortest_paths(x, y, cap)


def ball_volume(g: WeightedGraph, x: Vertex, r: float) -> float:
    return g.ball_volume(x, r)
