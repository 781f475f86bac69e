"""
Weighted porous medium equation on a graph.

    Δu^m = δ(x) u_t + ψ(x, t) u^m   ⇔   u_t = (Δu^m − ψ u^m) / δ

Solutions are produced numerically by classical RK4. The adaptive scheme uses
step doubling; the fixed scheme takes a set number of substeps per output
interval. Both record a local error estimate and abort with a diagnostic on
blow-up or loss of positivity.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.interpolate import CubicHermiteSpline

from scripts.config import NUMERICS_CONFIG
from scripts.errors import BlowUpError, FieldError, IntegrationError, PositivityLossError
from scripts.graph_calculus import laplacian, positive_power, term_scale
from scripts.graph_core import WeightedGraph
from scripts.time_field import TimeField

logger = logging.getLogger(__name__)

SCHEMES = ("explicit-rk4", "adaptive")


@dataclass
class PMEProblem:
    """Graph, exponent m, weight δ, source ψ(x, t), initial data and time span."""

    graph: WeightedGraph
    m: float
    delta: np.ndarray
    psi: TimeField
    u0: np.ndarray
    tspan: Tuple[float, float]
    theorem_mode: bool = True

    def __post_init__(self):
        g = self.graph
        self.m = float(self.m)
        self.delta = g.field(self.delta)
        self.u0 = g.field(self.u0)
        if not isinstance(self.psi, TimeField):
            self.psi = TimeField.constant(g.field(self.psi))
        if len(self.psi) != g.n:
            raise FieldError(f"psi has {len(self.psi)} rows, graph has {g.n} vertices")
        if np.any(self.delta == 0):
            bad = g.labels[int(np.argmin(np.abs(self.delta)))]
            raise FieldError(f"delta must be non-zero everywhere (zero at '{bad}')")
        if not np.all(self.u0 > 0):
            raise FieldError("initial data u0 must be positive")
        t1, t2 = (float(t) for t in self.tspan)
        if not t1 < t2:
            raise ValueError(f"time span needs T1 < T2, got [{t1}, {t2}]")
        self.tspan = (t1, t2)
        if self.theorem_mode and not self.m > 1:
            raise ValueError(f"theorem mode requires m > 1, got m={self.m}")


def rhs(problem: PMEProblem, u, t: float) -> np.ndarray:
    """
    u_t from the equation at state u and time t.

    Raises:
        FieldError: If u is not strictly positive or δ vanishes somewhere
    """
    return time_derivative(problem.graph, u, problem.psi(t), problem.delta, problem.m)


def time_derivative(g: WeightedGraph, u, psi, delta, m: float) -> np.ndarray:
    """u_t = (Δu^m − ψu^m)/δ for a frozen source value ψ."""
    u = g.field(u)
    delta = g.field(delta)
    if not np.all(u > 0):
        raise FieldError("rhs needs a strictly positive state")
    if np.any(delta == 0):
        raise FieldError("delta must be non-zero everywhere")
    um = positive_power(u, m)
    return (laplacian(g, um) - g.field(psi) * um) / delta


@dataclass
class Trajectory:
    """
    Stored states u(·, t_i) with the accepted derivatives and error estimates.

    Fixed-step runs carry no error estimate; their errors are zero.
    """

    times: np.ndarray
    states: np.ndarray
    derivatives: np.ndarray
    errors: np.ndarray
    scheme: str
    accepted_steps: int = 0
    rejected_steps: int = 0
    _spline: Optional[CubicHermiteSpline] = field(default=None, repr=False)

    @property
    def span(self) -> Tuple[float, float]:
        return float(self.times[0]), float(self.times[-1])

    def __len__(self) -> int:
        return len(self.times)

    def at(self, t: float) -> np.ndarray:
        """u(·, t) by cubic Hermite interpolation between stored states."""
        t0, t1 = self.span
        if not (t0 - 1e-12 <= t <= t1 + 1e-12):
            raise ValueError(f"t={t} outside trajectory span [{t0}, {t1}]")
        if self._spline is None:
            self._spline = CubicHermiteSpline(self.times, self.states, self.derivatives, axis=0)
        return np.asarray(self._spline(min(max(t, t0), t1)))

    def window(self, t_start: float, t_end: float) -> np.ndarray:
        """Indices of stored states with t_start ≤ t_i ≤ t_end."""
        return np.nonzero((self.times >= t_start - 1e-12) & (self.times <= t_end + 1e-12))[0]


def _rk4_step(f: Callable[[float, np.ndarray], np.ndarray], t: float, u: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, u)
    k2 = f(t + 0.5 * h, u + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, u + 0.5 * h * k2)
    k4 = f(t + h, u + h * k3)
    return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _doubled_step(f, t: float, u: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray, float]:
    """One full step, two half steps, and the Richardson error estimate."""
    with np.errstate(over="ignore", invalid="ignore"):
        full = _rk4_step(f, t, u, h)
        mid = _rk4_step(f, t, u, 0.5 * h)
        half = _rk4_step(f, t + 0.5 * h, mid, 0.5 * h)
        err = float(np.max(np.abs(half - full))) / 15.0
    return full, half, err


def integrate(
    problem: PMEProblem,
    scheme: str = "adaptive",
    output_points: int = 100,
    substeps: int = 1,
    tol: Optional[float] = None,
    ceiling: Optional[float] = None,
    min_step: Optional[float] = None,
    max_steps: Optional[int] = None,
) -> Trajectory:
    """
    Integrate the problem over its time span.

    Args:
        problem: The PME problem
        scheme: "explicit-rk4" (fixed steps) or "adaptive" (step doubling)
        output_points: Number of output intervals on a uniform grid
        substeps: Fixed RK4 steps per output interval (explicit-rk4 only)
        tol: Local error tolerance per unit time, relative to max(1, ‖u‖∞)
        ceiling: Norm ceiling for blow-up detection
        min_step: Smallest admissible adaptive step relative to max(1, |t|)
        max_steps: Budget of accepted plus rejected steps

    Returns:
        Trajectory on the output grid

    Raises:
        BlowUpError: Norm above ceiling, non-finite state, or step collapse
        PositivityLossError: A state fell below the positivity floor, or the
            adaptive step collapsed against non-positive stages
        IntegrationError: Step budget exhausted
    """
    if scheme not in SCHEMES:
        raise ValueError(f"Invalid scheme: {scheme}. Must be one of {SCHEMES}")
    if output_points < 1 or substeps < 1:
        raise ValueError("output_points and substeps must be >= 1")
    tol = NUMERICS_CONFIG["integration_tol"] if tol is None else tol
    ceiling = NUMERICS_CONFIG["blowup_ceiling"] if ceiling is None else ceiling
    min_step = NUMERICS_CONFIG["min_step"] if min_step is None else min_step
    max_steps = NUMERICS_CONFIG["max_steps"] if max_steps is None else max_steps
    floor = NUMERICS_CONFIG["positivity_floor"] if problem.theorem_mode else 0.0

    def f(t: float, u: np.ndarray) -> np.ndarray:
        return rhs(problem, u, t)

    def guard(u: np.ndarray, t: float) -> None:
        if not np.all(np.isfinite(u)) or float(np.max(np.abs(u))) > ceiling:
            raise BlowUpError(f"solution norm exceeded {ceiling:.3g}", t, u)
        if not float(np.min(u)) > floor:
            raise PositivityLossError(f"solution dropped below positivity floor {floor:.3g}", t, u)

    grid = np.linspace(problem.tspan[0], problem.tspan[1], output_points + 1)
    states = [problem.u0.copy()]
    derivatives = [f(grid[0], problem.u0)]
    errors = [0.0]
    u = problem.u0.copy()
    accepted = rejected = 0
    h = grid[1] - grid[0]

    for a, b in zip(grid[:-1], grid[1:]):
        interval_err = 0.0
        if scheme == "explicit-rk4":
            step = (b - a) / substeps
            t = a
            for k in range(substeps):
                try:
                    with np.errstate(over="ignore", invalid="ignore"):
                        full = _rk4_step(f, t, u, step)
                except FieldError as exc:
                    raise PositivityLossError(str(exc), t, u) from exc
                t = a + (k + 1) * step
                guard(full, t)
                u = full
                accepted += 1
        else:
            t = a
            # rejections since the last accepted step caused by a non-positive stage
            positivity_rejects = 0
            while b - t > 1e-14 * max(1.0, abs(b)):
                if accepted + rejected >= max_steps:
                    raise IntegrationError(f"step budget of {max_steps} exhausted", t, u)
                trial = min(h, b - t)
                try:
                    _, half, err = _doubled_step(f, t, u, trial)
                    ok = bool(np.all(np.isfinite(half)))
                except FieldError:
                    ok = False
                    positivity_rejects += 1
                if not ok:
                    # a stage left the positive cone or overflowed
                    rejected += 1
                    h = 0.25 * trial
                else:
                    allowed = tol * trial * max(1.0, float(np.max(np.abs(half))))
                    factor = 4.0 if err == 0 else min(4.0, max(0.2, 0.9 * (allowed / err) ** 0.25))
                    if err <= allowed:
                        t = b if trial == b - t else t + trial
                        guard(half, t)
                        u = half
                        interval_err += err
                        accepted += 1
                        positivity_rejects = 0
                        # keep the unclipped step for the next interval
                        if trial == h or factor < 1.0:
                            h = trial * factor
                    else:
                        rejected += 1
                        h = trial * factor
                if h < min_step * max(1.0, abs(t)):
                    if positivity_rejects:
                        raise PositivityLossError(
                            f"step size collapsed below {min_step:.3g} at the positivity boundary", t, u
                        )
                    raise BlowUpError(f"step size collapsed below {min_step:.3g}", t, u)

        states.append(u.copy())
        derivatives.append(f(b, u))
        errors.append(interval_err)
        logger.debug("t=%.6g max|u|=%.6g err=%.3g", b, float(np.max(u)), interval_err)

    return Trajectory(
        times=grid,
        states=np.array(states),
        derivatives=np.array(derivatives),
        errors=np.array(errors),
        scheme=scheme,
        accepted_steps=accepted,
        rejected_steps=rejected,
    )


class HypothesisRow(BaseModel):
    t: float
    u_positive: bool
    ut_positive: bool
    delta_negative: bool
    m_gt_one: bool
    holds: bool


class HypothesisReport(BaseModel):
    rows: List[HypothesisRow]
    all_hold: bool


def state_hypotheses(problem: PMEProblem, u: np.ndarray, t: float) -> HypothesisRow:
    """u > 0, u_t > 0, δ < 0 and m > 1 at one state."""
    u_positive = bool(np.all(u > 0))
    ut_positive = u_positive and bool(np.all(rhs(problem, u, t) > 0))
    delta_negative = bool(np.all(problem.delta < 0))
    m_gt_one = problem.m > 1
    return HypothesisRow(
        t=float(t),
        u_positive=u_positive,
        ut_positive=ut_positive,
        delta_negative=delta_negative,
        m_gt_one=m_gt_one,
        holds=u_positive and ut_positive and delta_negative and m_gt_one,
    )


def hypothesis_check(problem: PMEProblem, traj: Trajectory) -> HypothesisReport:
    """Evaluate the gradient-estimate hypotheses at every stored state."""
    rows = [state_hypotheses(problem, u, t) for t, u in zip(traj.times, traj.states)]
    return HypothesisReport(rows=rows, all_hold=all(row.holds for row in rows))


def equation_residual(problem: PMEProblem, traj: Trajectory) -> Tuple[np.ndarray, np.ndarray]:
    """
    |δu_t − Δu^m + ψu^m| at every stored state, with the matching scale.

    Returns:
        (max residual per state, max term magnitude per state)
    """
    g = problem.graph
    residuals, scales = [], []
    for t, u, ut in zip(traj.times, traj.states, traj.derivatives):
        um = positive_power(u, problem.m)
        psi_um = problem.psi(t) * um
        res = problem.delta * ut - laplacian(g, um) + psi_um
        residuals.append(float(np.max(np.abs(res))))
        scales.append(float(max(np.max(np.abs(problem.delta * ut)), np.max(term_scale(g, um)), np.max(np.abs(psi_um)))))
    return np.array(residuals), np.array(scales)


def blowup_time(u0: float, psi: float, m: float, delta: float = -1.0) -> float:
    """Blow-up time of the spatially constant problem (math.inf when it never blows up)."""
    rate = (m - 1.0) * psi / (-delta)
    return math.inf if rate <= 0 else u0 ** (1.0 - m) / rate


def constant_solution(u0: float, psi: float, m: float, t: float, delta: float = -1.0) -> float:
    """
    Closed form of the spatially constant problem u' = ψu^m / (−δ), m > 1.

    Raises:
        ValueError: If t is at or past the blow-up time
    """
    if not m > 1:
        raise ValueError(f"closed form needs m > 1, got {m}")
    base = u0 ** (1.0 - m) - (m - 1.0) * (psi / (-delta)) * t
    if base <= 0:
        raise ValueError(f"t={t} is at or past the blow-up time {blowup_time(u0, psi, m, delta)}")
    return base ** (-1.0 / (m - 1.0))
