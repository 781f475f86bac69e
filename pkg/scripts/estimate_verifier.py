"""
Numeric checks of the gradient estimates and the Harnack inequality.

Every check produces an EstimateReport whose rows carry both sides of the
inequality, the margin rhs − lhs and a status:

- pass:    margin ≥ −tol·(1 + |lhs| + |rhs|)
- fail:    the inequality is violated beyond rounding
- vacuous: the state does not satisfy the hypotheses (u_t > 0, δ < 0, m > 1)
"""
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from scripts.config import NUMERICS_CONFIG
from scripts.errors import FieldError
from scripts.graph_calculus import gamma, laplacian, positive_power
from scripts.graph_core import Vertex, WeightedGraph
from scripts.pme_dynamics import PMEProblem, Trajectory, state_hypotheses, time_derivative
from scripts.time_field import TimeField, integral, weighted_integral

logger = logging.getLogger(__name__)

STATUSES = ("pass", "fail", "vacuous")


class EstimateRow(BaseModel):
    x: str
    y: str
    t1: float
    t2: float
    lhs: float
    rhs: float
    margin: float
    status: str

    @property
    def key(self) -> Tuple[str, str, float, float]:
        return (self.x, self.y, self.t1, self.t2)


class EstimateReport(BaseModel):
    """Rows of one check, with the aggregate verdict."""

    check: str
    rows: List[EstimateRow] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    extras: Dict[str, Any] = Field(default_factory=dict)

    @property
    def counts(self) -> Dict[str, int]:
        counts = {status: 0 for status in STATUSES}
        for row in self.rows:
            counts[row.status] += 1
        return counts

    @property
    def passed(self) -> bool:
        """No row failed. Vacuous rows do not count against a report."""
        return all(row.status != "fail" for row in self.rows)

    @property
    def vacuous(self) -> bool:
        return bool(self.rows) and all(row.status == "vacuous" for row in self.rows)

    @property
    def worst(self) -> Optional[EstimateRow]:
        """Checked row with the smallest margin."""
        checked = [row for row in self.rows if row.status != "vacuous"]
        return min(checked, key=lambda row: (row.margin, row.key), default=None)

    def merge(self, other: "EstimateReport") -> "EstimateReport":
        """Combine two reports; the result does not depend on the order."""
        check = self.check if self.check == other.check else "+".join(sorted({self.check, other.check}))
        shared = {
            key: value for key, value in self.extras.items()
            if key in other.extras and other.extras[key] == value
        }
        return EstimateReport(
            check=check,
            rows=sorted(self.rows + other.rows, key=lambda row: row.key),
            notes=sorted(set(self.notes) | set(other.notes)),
            extras=shared,
        )


def classify(lhs: float, rhs: float, tol: Optional[float] = None) -> str:
    """pass/fail for lhs ≤ rhs with the rounding allowance."""
    tol = NUMERICS_CONFIG["pass_tol"] if tol is None else tol
    if math.isnan(lhs) or math.isnan(rhs):
        return "fail"
    if rhs == math.inf or lhs == -math.inf:
        return "pass"
    return "pass" if rhs - lhs >= -tol * (1.0 + abs(lhs) + abs(rhs)) else "fail"


def make_row(x: str, y: str, t1: float, t2: float, lhs: float, rhs: float,
             tol: Optional[float] = None, vacuous: bool = False) -> EstimateRow:
    lhs, rhs = float(lhs), float(rhs)
    with np.errstate(invalid="ignore"):
        margin = float(np.float64(rhs) - np.float64(lhs))
    status = "vacuous" if vacuous else classify(lhs, rhs, tol)
    return EstimateRow(x=x, y=y, t1=float(t1), t2=float(t2), lhs=lhs, rhs=rhs, margin=margin, status=status)


def _require_positive(u: np.ndarray) -> None:
    if not np.all(u > 0):
        raise FieldError("estimate checks need a strictly positive u")


# ========== Gradient estimates ==========

def check_t1(g: WeightedGraph, u, psi, delta, m: float, t: float = 0.0,
             tol: Optional[float] = None) -> EstimateReport:
    """
    Γ(u^{m/2})/u^m − (δu_t + ψu^m)/(2u^m) ≤ D_ϑ at every vertex.

    u_t is taken from the equation. The reduced form −Δu^{m/2}/u^{m/2} is
    evaluated alongside; `extras["reduced_gap"]` is the largest relative
    difference between the two left-hand sides.

    Raises:
        FieldError: If u is not strictly positive
        ValueError: If m ≤ 1
    """
    if not m > 1:
        raise ValueError(f"gradient estimate needs m > 1, got {m}")
    u, psi, delta = g.field(u), g.field(psi), g.field(delta)
    _require_positive(u)
    ut = time_derivative(g, u, psi, delta, m)
    um = positive_power(u, m)
    half = positive_power(u, m / 2.0)

    grad = gamma(g, half) / um
    source = (delta * ut + psi * um) / (2.0 * um)
    lhs = grad - source
    reduced = -laplacian(g, half) / half
    scale = np.maximum(1.0, np.maximum(np.abs(grad), np.abs(source)))
    gap = float(np.max(np.abs(lhs - reduced) / scale))

    d_theta = g.constants().d_theta
    rows = [make_row(label, label, t, t, lhs[i], d_theta, tol) for i, label in enumerate(g.labels)]
    return EstimateReport(
        check="t1",
        rows=rows,
        extras={
            "reduced_gap": gap,
            "reduced_margin_min": float(np.min(d_theta - reduced)),
            "d_theta": d_theta,
        },
    )


def check_t2(g: WeightedGraph, u, psi, delta, m: float, t: float = 0.0,
             tol: Optional[float] = None) -> EstimateReport:
    """
    Γ(u^{m/2})/u^m − u_t/u + ψ/2 ≤ D_ϑ at every vertex.

    When u > 0, u_t > 0, δ < 0 or m > 1 fails anywhere, every row is vacuous and
    the failed hypotheses are listed in the notes.
    """
    u, psi, delta = g.field(u), g.field(psi), g.field(delta)
    notes = []
    if not np.all(u > 0):
        notes.append("u > 0 fails")
    if not np.all(delta < 0):
        notes.append("delta < 0 fails")
    if not m > 1:
        notes.append("m > 1 fails")
    if np.any(delta == 0) or not np.all(u > 0):
        ut = None
    else:
        ut = time_derivative(g, u, psi, delta, m)
        if not np.all(ut > 0):
            notes.append("u_t > 0 fails")

    d_theta = g.constants().d_theta
    if ut is None:
        lhs = np.full(g.n, math.nan)
    else:
        um = positive_power(u, m)
        half = positive_power(u, m / 2.0)
        lhs = gamma(g, half) / um - ut / u + psi / 2.0
    vacuous = bool(notes)
    rows = [make_row(label, label, t, t, lhs[i], d_theta, tol, vacuous) for i, label in enumerate(g.labels)]
    return EstimateReport(check="t2", rows=rows, notes=notes, extras={"d_theta": d_theta})


# ========== Path functional ==========

def phi(g: WeightedGraph, path: Sequence[Vertex], psi: TimeField, t1: float, t2: float) -> float:
    """
    Shortest-path functional of the source term.

    With η = len(path) − 1 and t_k = T1 + k(T2 − T1)/η:

        Σ_k ½∫_{t_k}^{t_{k+1}} ψ(x_k) + (η²/(2(T2−T1)²)) ∫_{t_k}^{t_{k+1}} (t − t_k)² (ψ(x_{k+1}) − ψ(x_k))

    A one-vertex path gives ½∫_{T1}^{T2} ψ(x).

    Raises:
        ValueError: If T1 ≥ T2 or the path is not a shortest path
    """
    if not t1 < t2:
        raise ValueError(f"phi needs T1 < T2, got [{t1}, {t2}]")
    idx = [g.vertex_index(v) for v in path]
    if not idx:
        raise ValueError("phi needs a non-empty path")
    eta = len(idx) - 1
    if eta == 0:
        return 0.5 * psi.integral(idx[0], t1, t2)
    for a, b in zip(idx[:-1], idx[1:]):
        if b not in g.neighbors[a]:
            raise ValueError(f"'{g.labels[a]}' and '{g.labels[b]}' are not adjacent")
    if g.distance(idx[0], idx[-1]) != eta:
        raise ValueError(f"path of length {eta} is not a shortest path")

    length = t2 - t1
    weight = eta * eta / (2.0 * length * length)
    total = 0.0
    for k in range(eta):
        a, b = t1 + k * length / eta, t1 + (k + 1) * length / eta
        here, there = psi.polynomial(idx[k]), psi.polynomial(idx[k + 1])
        total += 0.5 * integral(here, a, b) + weight * weighted_integral(there - here, a, b, anchor=a)
    return total


def _segment_c7(g: WeightedGraph, path: Sequence[int], psi: TimeField, t1: float, t2: float, m: float) -> float:
    # per segment, in the u^{m/2} scale with the weight anchored at segment end
    c = g.constants()
    eta = len(path) - 1
    if eta == 0:
        return 0.5 * m * c.d_theta * (t2 - t1) + 0.25 * m * psi.integral(path[0], t1, t2)
    h = (t2 - t1) / eta
    total = 0.0
    for k in range(eta):
        a, b = t1 + k * h, t1 + (k + 1) * h
        here, there = psi.polynomial(path[k]), psi.polynomial(path[k + 1])
        total += (
            0.5 * m * c.d_theta * h
            + 2.0 * c.theta_max / (m * c.omega_min * h)
            + 0.25 * m * integral(here, a, b)
            + 0.25 * m / (h * h) * weighted_integral(there - here, a, b, anchor=b)
        )
    return total


# ========== Harnack inequality ==========

def _trajectory_hypotheses(problem: PMEProblem, traj: Trajectory, t1: float, t2: float) -> List[str]:
    failed = set()
    states = [(t1, traj.at(t1)), (t2, traj.at(t2))]
    states += [(traj.times[i], traj.states[i]) for i in traj.window(t1, t2)]
    for t, u in states:
        row = state_hypotheses(problem, u, t)
        for name, ok in (("u > 0", row.u_positive), ("u_t > 0", row.ut_positive),
                         ("delta < 0", row.delta_negative), ("m > 1", row.m_gt_one)):
            if not ok:
                failed.add(f"{name} fails")
    return sorted(failed)


def _distance_term(g: WeightedGraph, dist: int, m: float, length: float) -> float:
    if dist == 0:
        return 0.0
    c = g.constants()
    return 4.0 * c.theta_max * dist * dist / (m * m * c.omega_min * length)


def _check_window(traj: Trajectory, t1: float, t2: float) -> None:
    start, end = traj.span
    if not t1 < t2:
        raise ValueError(f"Harnack check needs T1 < T2, got [{t1}, {t2}]")
    if t1 < start - 1e-12 or t2 > end + 1e-12:
        raise ValueError(f"[{t1}, {t2}] is outside the trajectory span [{start}, {end}]")


def harnack_bound(
    g: WeightedGraph,
    traj: Trajectory,
    problem: PMEProblem,
    x: Vertex,
    y: Vertex,
    t1: float,
    t2: float,
    cap: Optional[int] = None,
    tol: Optional[float] = None,
) -> EstimateReport:
    """
    u(x, T1) ≤ u(y, T2)·exp{D_ϑ(T2−T1) + 4ϑ_max dist²/(m²ω_min(T2−T1)) + min Φ}.

    min Φ runs over the enumerated shortest paths; ties go to the first path
    in lexicographic order. A truncated enumeration is noted as not
    necessarily minimal.

    Raises:
        DisconnectedError: If x and y lie in different components
        ValueError: If [T1, T2] is not a proper sub-interval of the trajectory
    """
    _check_window(traj, t1, t2)
    xi, yi = g.vertex_index(x), g.vertex_index(y)
    enumeration = g.shortest_paths(xi, yi, cap)
    values = [phi(g, path, problem.psi, t1, t2) for path in enumeration.paths]
    best = int(np.argmin(values))
    min_phi = float(values[best])

    length = t2 - t1
    dist = enumeration.length
    m = problem.m
    exponent = g.constants().d_theta * length + _distance_term(g, dist, m, length) + min_phi

    u_x = float(traj.at(t1)[xi])
    u_y = float(traj.at(t2)[yi])
    with np.errstate(over="ignore"):
        rhs = float(u_y * np.exp(exponent))
    log_ratio = math.log(u_x / u_y) if u_x > 0 and u_y > 0 else math.nan

    notes = _trajectory_hypotheses(problem, traj, t1, t2)
    if enumeration.truncated:
        notes.append("path enumeration truncated: bound not necessarily minimal")
    vacuous = any(note.endswith("fails") for note in notes)
    row = make_row(g.labels[xi], g.labels[yi], t1, t2, u_x, rhs, tol, vacuous)
    c7 = _segment_c7(g, enumeration.paths[best], problem.psi, t1, t2, m)
    return EstimateReport(
        check="harnack",
        rows=[row],
        notes=notes,
        extras={
            "path": "-".join(enumeration.labels[best]),
            "n_paths": len(enumeration.paths),
            "truncated": enumeration.truncated,
            "min_phi": min_phi,
            "exponent": exponent,
            "log_ratio": log_ratio,
            "c7_margin": c7 - 0.5 * m * log_ratio,
        },
    )


def harnack_bounded_psi(
    g: WeightedGraph,
    traj: Trajectory,
    problem: PMEProblem,
    x: Vertex,
    y: Vertex,
    t1: float,
    t2: float,
    c0: float,
    cap: Optional[int] = None,
    tol: Optional[float] = None,
) -> EstimateReport:
    """
    Harnack bound with the source replaced by its sup-norm bound C0.

        u(x, T1) ≤ u(y, T2)·exp{(D_ϑ + 5C0/6)(T2−T1) + 4ϑ_max dist²/(m²ω_min(T2−T1))}

    The row also fails when this exponent falls below the path-functional
    exponent, which |ψ| ≤ C0 rules out.

    Raises:
        ValueError: If |ψ| exceeds C0 somewhere on the trajectory span
    """
    _check_window(traj, t1, t2)
    sup = problem.psi.sup_abs(*traj.span)
    if sup > c0 * (1.0 + 1e-12) + 1e-12:
        raise ValueError(f"|psi| reaches {sup:.6g} on the span, above C0={c0}")

    path_report = harnack_bound(g, traj, problem, x, y, t1, t2, cap, tol)
    path_row = path_report.rows[0]
    length = t2 - t1
    dist = g.distance(x, y)
    exponent = (g.constants().d_theta + 5.0 * c0 / 6.0) * length + _distance_term(g, dist, problem.m, length)
    u_y = float(traj.at(t2)[g.vertex_index(y)])
    with np.errstate(over="ignore"):
        rhs = float(u_y * np.exp(exponent))

    path_exponent = path_report.extras["exponent"]
    tol_value = NUMERICS_CONFIG["pass_tol"] if tol is None else tol
    ordering = exponent >= path_exponent - tol_value * (1.0 + abs(exponent) + abs(path_exponent))
    notes = list(path_report.notes)
    if not ordering:
        notes.append("C0 exponent below path-functional exponent")
    vacuous = path_row.status == "vacuous"
    row = make_row(path_row.x, path_row.y, t1, t2, path_row.lhs, rhs, tol, vacuous)
    if not vacuous and not ordering:
        row = row.model_copy(update={"status": "fail"})
    return EstimateReport(
        check="harnack_c0",
        rows=[row],
        notes=notes,
        extras={
            "c0": float(c0),
            "exponent": exponent,
            "path_exponent": path_exponent,
            "path_rhs": path_row.rhs,
            "ordering_holds": bool(ordering),
        },
    )


def random_pairs(
    g: WeightedGraph,
    traj: Trajectory,
    n: int,
    rng: np.random.Generator,
) -> List[Tuple[str, str, float, float]]:
    """Draw n (x, y, T1, T2) with x, y connected and T1 < T2 inside the trajectory span."""
    start, end = traj.span
    pairs = []
    while len(pairs) < n:
        xi = int(rng.integers(g.n))
        same = np.nonzero(g.component == g.component[xi])[0]
        yi = int(same[rng.integers(len(same))])
        t1, t2 = sorted(float(t) for t in rng.uniform(start, end, size=2))
        if t1 < t2:
            pairs.append((g.labels[xi], g.labels[yi], t1, t2))
    return pairs
