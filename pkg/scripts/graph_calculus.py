"""
Discrete calculus on weighted graphs.

    Δu(x)     = (1/ϑ(x)) Σ_{y~x} ω_xy (u(y) − u(x))
    Γ(u,v)(x) = (1/(2ϑ(x))) Σ_{y~x} ω_xy (u(y) − u(x))(v(y) − v(x))

Sums are accumulated edge by edge so that differences are formed before they
are weighted. All functions are pure.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from scripts.config import NUMERICS_CONFIG
from scripts.errors import FieldError
from scripts.graph_core import WeightedGraph

logger = logging.getLogger(__name__)

GRADIENT_READINGS = ("two_gamma", "gamma")


def _edge_sum(g: WeightedGraph, per_edge: np.ndarray, antisymmetric: bool) -> np.ndarray:
    # per_edge is oriented i -> j; the j end sees the negated value when antisymmetric
    at_i = np.bincount(g.edge_i, weights=per_edge, minlength=g.n)
    at_j = np.bincount(g.edge_j, weights=per_edge, minlength=g.n)
    return at_i - at_j if antisymmetric else at_i + at_j


def laplacian(g: WeightedGraph, u) -> np.ndarray:
    """ϑ-Laplacian Δu at every vertex."""
    u = g.field(u)
    diff = u[g.edge_j] - u[g.edge_i]
    return _edge_sum(g, g.edge_w * diff, antisymmetric=True) / g.theta


def gamma(g: WeightedGraph, u, v=None) -> np.ndarray:
    """Gradient form Γ(u, v); Γ(u) when v is omitted."""
    u = g.field(u)
    v = u if v is None else g.field(v)
    prod = g.edge_w * (u[g.edge_j] - u[g.edge_i]) * (v[g.edge_j] - v[g.edge_i])
    return _edge_sum(g, prod, antisymmetric=False) / (2.0 * g.theta)


def gamma_via_product(g: WeightedGraph, u, v) -> np.ndarray:
    """Γ(u, v) from ½[Δ(uv) − uΔv − vΔu]."""
    u, v = g.field(u), g.field(v)
    return 0.5 * (laplacian(g, u * v) - u * laplacian(g, v) - v * laplacian(g, u))


def term_scale(g: WeightedGraph, f) -> np.ndarray:
    """(1/ϑ(x)) Σ_{y~x} ω_xy (|f(y)| + |f(x)|): bounds every term entering Δf(x)."""
    f = np.abs(g.field(f))
    return (g.weights @ f + g.degree * f) / g.theta


def positive_power(u, m: float, floor: Optional[float] = None) -> np.ndarray:
    """
    Elementwise u^m for a strictly positive field.

    Raises:
        FieldError: If any entry is below the power floor
    """
    floor = NUMERICS_CONFIG["power_floor"] if floor is None else floor
    u = np.asarray(u, dtype=float)
    if not np.all(u >= floor):
        raise FieldError(f"field must be positive (min {np.min(u):.3g} below floor {floor:.3g})")
    return u ** m


def power_identity_residual(g: WeightedGraph, u, m: float) -> np.ndarray:
    """Δu^m − 2u^{m/2}Δu^{m/2} − 2Γ(u^{m/2}) at every vertex."""
    u = g.field(u)
    um = positive_power(u, m)
    half = positive_power(u, m / 2.0)
    return laplacian(g, um) - 2.0 * half * laplacian(g, half) - 2.0 * gamma(g, half)


@dataclass(frozen=True)
class IdentityResult:
    m: float
    max_abs_residual: float
    max_rel_residual: float
    holds: bool


def verify_identity(
    g: WeightedGraph,
    u,
    ms: Iterable[float] = (1.5, 2.0, 3.0, -1.0),
    tol: Optional[float] = None,
) -> List[IdentityResult]:
    """
    Evaluate the power identity for several exponents.

    The relative residual divides by the largest term entering Δu^m.
    """
    tol = NUMERICS_CONFIG["identity_tol"] if tol is None else tol
    results = []
    for m in ms:
        res = np.abs(power_identity_residual(g, u, m))
        scale = max(float(np.max(term_scale(g, positive_power(g.field(u), m)))), np.finfo(float).tiny)
        max_abs = float(np.max(res)) if res.size else 0.0
        rel = max_abs / scale
        results.append(IdentityResult(m=float(m), max_abs_residual=max_abs, max_rel_residual=rel, holds=rel <= tol))
    return results


def divergence_sum(g: WeightedGraph, u) -> Tuple[float, float]:
    """Σ ϑ(x)Δu(x) and the sum of absolute terms it is made of."""
    u = g.field(u)
    flux = g.edge_w * (u[g.edge_j] - u[g.edge_i])
    total = float(np.sum(g.theta * laplacian(g, u)))
    return total, float(2.0 * np.sum(np.abs(flux)))


def chain_rule_sides(g: WeightedGraph, u, p: float, gradient: str = "two_gamma") -> Tuple[np.ndarray, np.ndarray]:
    """
    Both sides of Δu^p = p u^{p−1}Δu + ((p−1)/p) u^{−p} |∇u^p|².

    Args:
        g: Graph
        u: Positive field
        p: Non-zero exponent
        gradient: Reading of |∇f|²: "two_gamma" for 2Γ(f), "gamma" for Γ(f)

    Returns:
        (lhs, rhs) per vertex
    """
    if p == 0:
        raise ValueError("chain rule check needs p != 0")
    if gradient not in GRADIENT_READINGS:
        raise ValueError(f"Invalid gradient reading: {gradient}. Must be one of {GRADIENT_READINGS}")
    u = g.field(u)
    up = positive_power(u, p)
    grad2 = gamma(g, up) * (2.0 if gradient == "two_gamma" else 1.0)
    lhs = laplacian(g, up)
    rhs = p * positive_power(u, p - 1.0) * laplacian(g, u) + ((p - 1.0) / p) * positive_power(u, -p) * grad2
    return lhs, rhs


@dataclass(frozen=True)
class ChainRuleWitness:
    graph: str
    u: np.ndarray
    vertex: str
    p: float
    lhs: float
    rhs: float


def chain_rule_counterexample(
    g: WeightedGraph,
    p: float,
    rng: Optional[np.random.Generator] = None,
    budget: int = 100,
    gradient: str = "two_gamma",
    tol: float = 1e-9,
) -> Optional[ChainRuleWitness]:
    """
    Search random positive fields for a vertex where the continuum chain rule fails.

    Returns:
        The first witness found, or None when every trial agrees to tol
        relative to the largest term
    """
    if p == 0:
        raise ValueError("chain rule check needs p != 0")
    rng = np.random.default_rng(0) if rng is None else rng
    for trial in range(budget):
        u = rng.uniform(0.1, 10.0, size=g.n)
        lhs, rhs = chain_rule_sides(g, u, p, gradient)
        scale = np.maximum.reduce([np.abs(lhs), np.abs(rhs), term_scale(g, positive_power(u, p))])
        gap = np.abs(lhs - rhs) - tol * np.maximum(scale, 1.0)
        worst = int(np.argmax(gap))
        if gap[worst] > 0:
            logger.debug("chain rule witness for p=%g after %d trials at %s", p, trial + 1, g.labels[worst])
            return ChainRuleWitness(
                graph=g.name, u=u, vertex=g.labels[worst], p=float(p),
                lhs=float(lhs[worst]), rhs=float(rhs[worst]),
            )
    return None
