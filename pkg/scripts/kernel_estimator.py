"""
Heat kernel on a finite graph and the kernel bounds.

With ϑ = deg the kernel is the Poisson mixture of random-walk transitions

    p(t, x, y) = e^{−t} Σ_k (t^k / k!) p_k(x, y) / deg(y),   p_1(x, y) = ω_xy / deg(x)

The series is truncated where the Poisson tail is certified below ε; a dense
matrix exponential of the generator serves as an independent oracle.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.linalg import expm
from scipy.special import gammainc
from scipy.stats import poisson

from scripts.config import GRAPH_CONFIG, KERNEL_CONFIG
from scripts.errors import GraphValidationError
from scripts.estimate_verifier import EstimateReport, classify, make_row
from scripts.graph_core import Vertex, WeightedGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelMatrix:
    """p(t, x, y) for every pair, with the truncation order and certified error."""

    t: float
    values: np.ndarray
    order: Optional[int]
    eps: float
    labels: Tuple[str, ...]
    _index: Dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.values.setflags(write=False)
        self._index.update({label: i for i, label in enumerate(self.labels)})

    def _resolve(self, v: Vertex) -> int:
        return self._index[v] if isinstance(v, str) else int(v)

    def value(self, x: Vertex, y: Vertex) -> float:
        return float(self.values[self._resolve(x), self._resolve(y)])

    def max_abs_diff(self, other: "KernelMatrix") -> float:
        if self.values.shape != other.values.shape:
            raise ValueError("kernels are defined on graphs of different sizes")
        return float(np.max(np.abs(self.values - other.values)))

    def symmetry_defect(self) -> float:
        """max |p(t, x, y) − p(t, y, x)|."""
        return float(np.max(np.abs(self.values - self.values.T)))


def transition_matrix(g: WeightedGraph) -> np.ndarray:
    """One-step walk p(x, y) = ω_xy / deg(x)."""
    if np.any(g.degree <= 0):
        raise GraphValidationError("random walk needs every vertex to have an edge")
    return g.dense_weights() / g.degree[:, None]


def walk_kernel(g: WeightedGraph, k: int) -> np.ndarray:
    """k-step transition matrix p_k; p_0 is the identity."""
    if k < 0:
        raise ValueError(f"walk order must be non-negative, got {k}")
    if k == 0:
        return np.eye(g.n)
    return np.linalg.matrix_power(transition_matrix(g), k)


def truncation_order(t: float, eps: float, min_degree: float, max_order: Optional[int] = None) -> int:
    """
    Smallest K with Poisson tail P(N > K) ≤ ε·min(1, min deg).

    The tail is the regularized lower incomplete gamma P(K + 1, t).
    """
    max_order = KERNEL_CONFIG["max_order"] if max_order is None else max_order
    target = eps * min(1.0, min_degree)
    order = 0
    while gammainc(order + 1, t) > target:
        order += 1
        if order > max_order:
            raise ValueError(f"kernel series needs more than {max_order} terms at t={t}")
    return order


def _require_degree_measure(g: WeightedGraph, what: str) -> None:
    if not g.theta_is_degree():
        raise ValueError(f"{what} requires theta = deg")


def heat_kernel_series(g: WeightedGraph, t: float, eps: Optional[float] = None,
                       order: Optional[int] = None) -> KernelMatrix:
    """
    Truncated series kernel with entrywise error at most ε.

    Args:
        g: Graph with ϑ = deg
        t: Time, t > 0
        eps: Certified truncation error (default KERNEL_CONFIG["eps"])
        order: Explicit truncation order, overriding the certified one

    Raises:
        ValueError: If t ≤ 0 or ϑ ≠ deg
    """
    if not t > 0:
        raise ValueError(f"kernel time must be positive, got {t}")
    _require_degree_measure(g, "series kernel")
    eps = KERNEL_CONFIG["eps"] if eps is None else eps
    step = transition_matrix(g)
    order = truncation_order(t, eps, float(np.min(g.degree))) if order is None else order
    weights = poisson.pmf(np.arange(order + 1), t)

    total = np.zeros((g.n, g.n))
    compensation = np.zeros((g.n, g.n))
    power = np.eye(g.n)
    for k in range(order + 1):
        # Kahan summation of w_k p_k
        term = weights[k] * power - compensation
        updated = total + term
        compensation = (updated - total) - term
        total = updated
        power = power @ step
    logger.debug("series kernel t=%g truncated at K=%d", t, order)
    return KernelMatrix(t=float(t), values=total / g.degree[None, :], order=order, eps=eps, labels=g.labels)


def heat_kernel_oracle(g: WeightedGraph, t: float) -> KernelMatrix:
    """
    Kernel from the dense exponential of the generator, p = [exp(tΔ)]_xy / ϑ(y).

    Raises:
        ValueError: If the graph exceeds the dense size cap or t < 0
    """
    cap = GRAPH_CONFIG["dense_cap"]
    if g.n > cap:
        raise ValueError(f"dense kernel limited to {cap} vertices, graph has {g.n}")
    if t < 0:
        raise ValueError(f"kernel time must be non-negative, got {t}")
    generator = g.dense_weights() / g.theta[:, None] - np.diag(g.degree / g.theta)
    values = expm(t * generator) / g.theta[None, :]
    return KernelMatrix(t=float(t), values=values, order=None, eps=0.0, labels=g.labels)


def compose(k_s: KernelMatrix, k_t: KernelMatrix, g: WeightedGraph) -> KernelMatrix:
    """Σ_z p(s, x, z) ϑ(z) p(t, z, y): the kernel at s + t."""
    values = k_s.values @ (g.theta[:, None] * k_t.values)
    return KernelMatrix(t=k_s.t + k_t.t, values=values, order=None, eps=k_s.eps + k_t.eps, labels=g.labels)


def upper_bound_t4i(g: WeightedGraph, t: float, x: Vertex, c0: float = 0.0, m: float = 2.0) -> float:
    """exp{4√((6D_ϑ + 5C0)ϑ_max t / (6m²ω_min))} / Vol B(x, √t)."""
    if not t > 0:
        raise ValueError(f"kernel bound needs t > 0, got {t}")
    if not m > 1:
        raise ValueError(f"kernel bound needs m > 1, got {m}")
    c = g.constants()
    exponent = 4.0 * math.sqrt((6.0 * c.d_theta + 5.0 * c0) * c.theta_max * t / (6.0 * m * m * c.omega_min))
    return math.exp(exponent) / g.ball_volume(x, math.sqrt(t))


def lower_bound_t4ii(g: WeightedGraph, t: float, x: Vertex, y: Vertex, c0: float = 0.0, m: float = 2.0) -> float:
    """
    (1/deg(y))·exp{−(1 + 5C0/6)t − 4ϑ_max dist(x, y)² / (m²ω_min t)}.

    Raises:
        ValueError: If ϑ ≠ deg, t ≤ 0 or m ≤ 1
    """
    _require_degree_measure(g, "kernel lower bound")
    if not t > 0:
        raise ValueError(f"kernel bound needs t > 0, got {t}")
    if not m > 1:
        raise ValueError(f"kernel bound needs m > 1, got {m}")
    c = g.constants()
    dist = g.distance(x, y)
    if dist == math.inf:
        return 0.0
    spread = 4.0 * c.theta_max * dist * dist / (m * m * c.omega_min * t) if dist else 0.0
    return math.exp(-(1.0 + 5.0 * c0 / 6.0) * t - spread) / g.degree[g.vertex_index(y)]


def mass_check(kern: KernelMatrix, g: WeightedGraph, tol: Optional[float] = None) -> EstimateReport:
    """
    Σ_z ϑ(z) p(t, x, z) ≤ 1 + ε for every x.

    `extras["conserved"]` records whether every mass is also within ε of 1.
    """
    masses = kern.values @ g.theta
    slack = kern.eps + 1e-12
    rows = [make_row(label, "*", kern.t, kern.t, masses[i], 1.0 + kern.eps, tol) for i, label in enumerate(g.labels)]
    deviation = float(np.max(np.abs(masses - 1.0)))
    return EstimateReport(
        check="mass",
        rows=rows,
        extras={
            "min_mass": float(np.min(masses)),
            "max_mass": float(np.max(masses)),
            "max_deviation": deviation,
            "conserved": deviation <= slack,
        },
    )


class KernelRow(BaseModel):
    x: str
    y: str
    t: float
    p: float
    upper_bound: float
    lower_bound: float
    status: str

    @property
    def key(self) -> Tuple[str, str, float]:
        return (self.x, self.y, self.t)


class KernelReport(BaseModel):
    m: float
    c0: float
    rows: List[KernelRow] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    @property
    def counts(self) -> Dict[str, int]:
        counts = {"pass": 0, "fail": 0, "vacuous": 0}
        for row in self.rows:
            counts[row.status] += 1
        return counts

    @property
    def passed(self) -> bool:
        return all(row.status != "fail" for row in self.rows)

    @property
    def worst_upper_margin(self) -> float:
        return min((row.upper_bound - row.p for row in self.rows), default=math.inf)

    @property
    def worst_lower_margin(self) -> float:
        margins = [row.p - row.lower_bound for row in self.rows if not math.isnan(row.lower_bound)]
        return min(margins, default=math.inf)


def check_bounds(kern: KernelMatrix, g: WeightedGraph, m: float, c0: float = 0.0,
                 tol: Optional[float] = None) -> KernelReport:
    """
    Compare every kernel entry with the upper bound and, when ϑ = deg, the lower bound.

    The series truncation error ε is allowed on both sides.
    """
    with_lower = g.theta_is_degree()
    notes = [] if with_lower else ["lower bound skipped: theta != deg"]
    rows = []
    for i, x in enumerate(g.labels):
        upper = upper_bound_t4i(g, kern.t, i, c0, m)
        for j, y in enumerate(g.labels):
            p = float(kern.values[i, j])
            lower = lower_bound_t4ii(g, kern.t, i, j, c0, m) if with_lower else math.nan
            ok = classify(p - kern.eps, upper, tol) == "pass"
            if with_lower:
                ok = ok and classify(lower, p + kern.eps, tol) == "pass"
            rows.append(KernelRow(x=x, y=y, t=kern.t, p=p, upper_bound=upper, lower_bound=lower,
                                  status="pass" if ok else "fail"))
    return KernelReport(m=float(m), c0=float(c0), rows=rows, notes=notes)
