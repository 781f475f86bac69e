"""
Polynomial functions of time.

ψ(x, t) is stored per vertex as a polynomial of degree ≤ 3 so that every time
integral the verifiers need is exact.
"""
from typing import Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

MAX_DEGREE = 3


def as_polynomial(coeffs: Union[Sequence[float], Polynomial]) -> Polynomial:
    """Polynomial from increasing-order coefficients, degree ≤ 3."""
    if isinstance(coeffs, Polynomial):
        poly = coeffs
    else:
        poly = Polynomial(np.asarray(coeffs, dtype=float) if len(coeffs) else [0.0])
    if poly.degree() > MAX_DEGREE:
        raise ValueError(f"time polynomials have degree <= {MAX_DEGREE}, got {poly.degree()}")
    return poly


def integral(poly: Polynomial, a: float, b: float) -> float:
    """∫_a^b poly(t) dt."""
    anti = poly.integ()
    return float(anti(b) - anti(a))


def weighted_integral(poly: Polynomial, a: float, b: float, anchor: float) -> float:
    """∫_a^b (t − anchor)² poly(t) dt."""
    return integral(Polynomial([anchor * anchor, -2.0 * anchor, 1.0]) * poly, a, b)


def sup_abs(poly: Polynomial, a: float, b: float) -> float:
    """max |poly| on [a, b], from the endpoints and the critical points."""
    candidates = [a, b]
    if poly.degree() >= 2:
        for root in poly.deriv().roots():
            if abs(root.imag) < 1e-12 and a <= root.real <= b:
                candidates.append(float(root.real))
    return float(max(abs(poly(t)) for t in candidates))


class TimeField:
    """Per-vertex polynomial in t: ψ(x, t) = Σ_k c_k(x) t^k, k ≤ 3."""

    def __init__(self, coeffs):
        arr = np.atleast_2d(np.asarray(coeffs, dtype=float))
        if arr.shape[1] > MAX_DEGREE + 1:
            raise ValueError(f"time polynomials have at most {MAX_DEGREE + 1} coefficients")
        padded = np.zeros((arr.shape[0], MAX_DEGREE + 1))
        padded[:, : arr.shape[1]] = arr
        padded.setflags(write=False)
        self.coeffs = padded

    @classmethod
    def constant(cls, values) -> "TimeField":
        values = np.asarray(values, dtype=float)
        return cls(values.reshape(-1, 1))

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def __repr__(self) -> str:
        return f"TimeField(n={len(self)}, constant={self.is_constant()})"

    def __call__(self, t: float) -> np.ndarray:
        """Values at time t, one per vertex."""
        return P.polyval(t, self.coeffs.T)

    def polynomial(self, i: int) -> Polynomial:
        return Polynomial(self.coeffs[i])

    def is_constant(self) -> bool:
        return bool(np.all(self.coeffs[:, 1:] == 0.0))

    def integral(self, i: int, a: float, b: float) -> float:
        return integral(self.polynomial(i), a, b)

    def sup_abs(self, a: float, b: float) -> float:
        """max_x max_{t∈[a,b]} |ψ(x, t)|."""
        return max((sup_abs(self.polynomial(i), a, b) for i in range(len(self))), default=0.0)
