"""Riemann-sum error bounds, 1D/2D, right-endpoint and midpoint rules.

Each verifier returns the sum, a reference integral from adaptive
quadrature, the actual error and the closed-form bound:

    right 1D:  M1 (b-a)^2 / (2n)
    right 2D:  (Mx + My) (b-a)^3 / (2n)
    mid   1D:  M2 (b-a)^3 / (24 n^2)
    mid   2D:  (Mx + My) (b-a)^4 / (24 n^2)

Derivative bounds are understood as bounds on absolute values.  The 2D
midpoint bound is the leading term; its O(1/n^4) remainder is dropped, so
assert it for n >= 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = [
    "RiemannProblem",
    "RiemannResult",
    "riemann_right_1d",
    "riemann_right_2d",
    "riemann_mid_1d",
    "riemann_mid_2d",
]

_QUAD_TOL = 1e-12


@dataclass(frozen=True)
class RiemannProblem:
    """f over [a, b] (or [a, b]^2) with n subdivisions per axis.

    deriv_bounds: (M1,) or (Mx, My) for the right rule; (M2,) or (Mx, My)
    for the midpoint rule, always bounding absolute derivative values.
    """

    f: Callable[..., float]
    domain: tuple[float, float]
    n: int
    deriv_bounds: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not all(np.isfinite(self.deriv_bounds)):
            raise ValueError("derivative bounds must be finite")


@dataclass(frozen=True)
class RiemannResult:
    sum: float
    integral: float
    error: float
    bound: float

    def to_dict(self) -> dict:
        return {"sum": self.sum, "integral": self.integral, "error": self.error, "bound": self.bound}


def _integral_1d(f, a, b) -> float:
    val, _ = integrate.quad(f, a, b, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=500)
    return val


def _integral_2d(f, a, b) -> float:
    val, _ = integrate.dblquad(
        lambda y, x: f(x, y), a, b, a, b, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL
    )
    return val


def riemann_right_1d(p: RiemannProblem) -> RiemannResult:
    a, b = p.domain
    step = (b - a) / p.n
    xs = a + step * np.arange(1, p.n + 1)
    total = float(sum(p.f(x) for x in xs) * step)
    integral = _integral_1d(p.f, a, b)
    m1 = p.deriv_bounds[0]
    return RiemannResult(total, integral, abs(total - integral), m1 * (b - a) ** 2 / (2 * p.n))


def riemann_right_2d(p: RiemannProblem) -> RiemannResult:
    a, b = p.domain
    step = (b - a) / p.n
    xs = a + step * np.arange(1, p.n + 1)
    total = float(sum(p.f(x, y) for x in xs for y in xs) * step * step)
    integral = _integral_2d(p.f, a, b)
    mx, my = (p.deriv_bounds * 2)[:2]
    return RiemannResult(total, integral, abs(total - integral), (mx + my) * (b - a) ** 3 / (2 * p.n))


def riemann_mid_1d(p: RiemannProblem) -> RiemannResult:
    a, b = p.domain
    step = (b - a) / p.n
    xs = a + step * (np.arange(p.n) + 0.5)
    total = float(sum(p.f(x) for x in xs) * step)
    integral = _integral_1d(p.f, a, b)
    m2 = p.deriv_bounds[0]
    return RiemannResult(total, integral, abs(total - integral), m2 * (b - a) ** 3 / (24 * p.n**2))


def riemann_mid_2d(p: RiemannProblem) -> RiemannResult:
    a, b = p.domain
    step = (b - a) / p.n
    xs = a + step * (np.arange(p.n) + 0.5)
    total = float(sum(p.f(x, y) for x in xs for y in xs) * step * step)
    integral = _integral_2d(p.f, a, b)
    mx, my = (p.deriv_bounds * 2)[:2]
    return RiemannResult(
        total, integral, abs(total - integral), (mx + my) * (b - a) ** 4 / (24 * p.n**2)
    )
