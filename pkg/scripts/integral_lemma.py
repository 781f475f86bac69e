"""
Check of the calculus inequality behind the Harnack estimate.

For c, α > 0 and γ, ψ1, ψ2 on [T1, T2]:

    min_s  γ(s) − (1/c)∫_s^{T2} γ² + α∫_{T1}^s ψ1 + α∫_s^{T2} ψ2
        ≤  c/(T2−T1) + α∫ψ1 + (α/(T2−T1)²)∫(t − τ)²(ψ2 − ψ1)

The weight is anchored at τ = T1 ("start") or τ = T2 ("end"). Only the
start-anchored form holds for every instance; both are always reported.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, field_validator, model_validator

from scripts.estimate_verifier import classify
from scripts.time_field import MAX_DEGREE, as_polynomial, integral, weighted_integral

logger = logging.getLogger(__name__)

ANCHORS = ("start", "end")
MAX_REFINED_POINTS = 2 ** 20


class LemmaInstance(BaseModel):
    """Constants, interval and polynomial coefficients (increasing order)."""

    c: float
    alpha: float
    t1: float
    t2: float
    gamma: List[float]
    psi1: List[float]
    psi2: List[float]

    @field_validator("c", "alpha")
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError(f"must be positive, got {value}")
        return value

    @field_validator("gamma", "psi1", "psi2")
    @classmethod
    def _cubic(cls, coeffs: List[float]) -> List[float]:
        if not 1 <= len(coeffs) <= MAX_DEGREE + 1:
            raise ValueError(f"expected 1 to {MAX_DEGREE + 1} coefficients, got {len(coeffs)}")
        return coeffs

    @model_validator(mode="after")
    def _interval(self) -> "LemmaInstance":
        if not self.t1 < self.t2:
            raise ValueError(f"interval needs T1 < T2, got [{self.t1}, {self.t2}]")
        return self

    @property
    def length(self) -> float:
        return self.t2 - self.t1

    def polynomials(self) -> Tuple[Polynomial, Polynomial, Polynomial]:
        return as_polynomial(self.gamma), as_polynomial(self.psi1), as_polynomial(self.psi2)


class LemmaResult(BaseModel):
    lhs: float
    rhs: float
    rhs_end: float
    holds: bool
    holds_end: bool
    argmin: float
    points: int
    refined: bool
    weight_anchor: str

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def bracket(inst: LemmaInstance, s: np.ndarray) -> np.ndarray:
    """The bracketed expression evaluated at every s."""
    gam, psi1, psi2 = inst.polynomials()
    sq = (gam * gam).integ()
    p1, p2 = psi1.integ(), psi2.integ()
    return (
        gam(s)
        - (sq(inst.t2) - sq(s)) / inst.c
        + inst.alpha * (p1(s) - p1(inst.t1))
        + inst.alpha * (p2(inst.t2) - p2(s))
    )


def bracket_min(inst: LemmaInstance, intervals: int) -> Tuple[float, float]:
    """Minimum of the bracket over the uniform grid with the given number of intervals."""
    s = np.linspace(inst.t1, inst.t2, intervals + 1)
    values = bracket(inst, s)
    k = int(np.argmin(values))
    return float(values[k]), float(s[k])


def lemma_rhs(inst: LemmaInstance, weight_anchor: str = "start") -> float:
    if weight_anchor not in ANCHORS:
        raise ValueError(f"Invalid weight anchor: {weight_anchor}. Must be one of {ANCHORS}")
    _, psi1, psi2 = inst.polynomials()
    length = inst.length
    anchor = inst.t1 if weight_anchor == "start" else inst.t2
    return (
        inst.c / length
        + inst.alpha * integral(psi1, inst.t1, inst.t2)
        + inst.alpha / (length * length) * weighted_integral(psi2 - psi1, inst.t1, inst.t2, anchor)
    )


def lemma_l2_check(
    inst: LemmaInstance,
    grid: int = 64,
    weight_anchor: str = "start",
    tol: Optional[float] = None,
) -> LemmaResult:
    """
    Evaluate both sides of the inequality.

    The minimum over s is taken on a uniform grid with `grid` interior points
    and both endpoints. A violation doubles the grid (nested, so the minimum
    never increases) up to 2^20 points before it is reported.

    Raises:
        ValueError: If grid < 3 or the anchor is unknown
    """
    if grid < 3:
        raise ValueError(f"lemma grid needs at least 3 interior points, got {grid}")
    rhs = lemma_rhs(inst, weight_anchor)
    rhs_end = lemma_rhs(inst, "end")
    intervals = grid + 1
    lhs, argmin = bracket_min(inst, intervals)
    refined = False
    while classify(lhs, rhs, tol) == "fail" and intervals * 2 + 1 <= MAX_REFINED_POINTS:
        intervals *= 2
        lhs, argmin = bracket_min(inst, intervals)
        refined = True
    if refined:
        logger.warning("lemma grid refined to %d points (lhs=%.6g rhs=%.6g)", intervals + 1, lhs, rhs)

    return LemmaResult(
        lhs=lhs,
        rhs=rhs,
        rhs_end=rhs_end,
        holds=classify(lhs, rhs, tol) == "pass",
        holds_end=classify(lhs, rhs_end, tol) == "pass",
        argmin=argmin,
        points=intervals + 1,
        refined=refined,
        weight_anchor=weight_anchor,
    )


def random_instance(rng: np.random.Generator) -> LemmaInstance:
    """Random constants, interval and polynomials of random degree ≤ 3."""
    t1 = float(rng.uniform(-1.0, 1.0))

    def coeffs() -> List[float]:
        degree = int(rng.integers(0, MAX_DEGREE + 1))
        return [float(v) for v in rng.normal(0.0, 2.0, size=degree + 1)]

    return LemmaInstance(
        c=float(rng.uniform(0.1, 5.0)),
        alpha=float(rng.uniform(0.1, 5.0)),
        t1=t1,
        t2=t1 + float(rng.uniform(0.1, 3.0)),
        gamma=coeffs(),
        psi1=coeffs(),
        psi2=coeffs(),
    )


def sweep(
    n: int,
    seed: int = 0,
    grid: int = 64,
    weight_anchor: str = "start",
    tol: Optional[float] = None,
) -> List[Tuple[LemmaInstance, LemmaResult]]:
    """Check n random instances drawn from one seeded generator."""
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(n):
        inst = random_instance(rng)
        results.append((inst, lemma_l2_check(inst, grid, weight_anchor, tol)))
    failures = sum(not result.holds for _, result in results)
    logger.info("lemma sweep: %d instances, %d violations", n, failures)
    return results
