"""Exact amplitude-estimation statistics in the 2D invariant subspace.

The reflection pair of amplitude amplification acts as a rotation by
2 * arcsin(sqrt(a)) on the plane spanned by the good and bad components,
so phase estimation on it has the closed-form outcome law implemented
here.  No state vector over the arithmetic registers is ever built; the
post-selection probability a fully determines the statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadAmplitudeError

__all__ = ["QAEConfig", "qae_outcome_distribution", "qae_estimate", "qae_error_bound"]


@dataclass(frozen=True)
class QAEConfig:
    """grover_power is the number of amplification steps per run (t);
    the phase register uses M = t rounded up to a power of two."""

    grover_power: int
    repetitions: int = 15
    delta: float = 0.05
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.grover_power < 1:
            raise ValueError("grover_power must be >= 1")
        if self.repetitions < 1 or self.repetitions % 2 == 0:
            raise ValueError("repetitions must be a positive odd count")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")

    @property
    def phase_bins(self) -> int:
        return 1 << max(1, (self.grover_power - 1).bit_length())


def _fejer(delta: np.ndarray, m: int) -> np.ndarray:
    """|(1/M) sum_x exp(i x delta)|^2, the phase-estimation kernel."""
    half = 0.5 * delta
    num = np.sin(m * half)
    den = m * np.sin(half)
    out = np.empty_like(delta)
    on_peak = np.isclose(np.sin(half), 0.0, atol=1e-15)
    out[on_peak] = 1.0
    out[~on_peak] = (num[~on_peak] / den[~on_peak]) ** 2
    return out


def qae_outcome_distribution(a: float, m: int) -> np.ndarray:
    """P(y) over the M phase bins for true amplitude a.

    The rotation eigenphases are +-2 arcsin(sqrt(a)); the start state
    weights them equally, so the law is the symmetrized kernel.  Entries
    sum to 1 up to float roundoff.
    """
    if not 0.0 <= a <= 1.0:
        raise BadAmplitudeError(f"amplitude {a} outside [0, 1]")
    if m < 2 or m & (m - 1):
        raise ValueError("m must be a power of two >= 2")
    phi = math.asin(math.sqrt(a))
    y = np.arange(m)
    grid = 2.0 * np.pi * y / m
    return 0.5 * (_fejer(2.0 * phi - grid, m) + _fejer(-2.0 * phi - grid, m))


def qae_estimate(a: float, cfg: QAEConfig) -> float:
    """Median over repetitions of sampled sin^2(pi y / M) estimates."""
    m = cfg.phase_bins
    probs = qae_outcome_distribution(a, m)
    probs = probs / probs.sum()  # remove float drift for the sampler
    rng = np.random.default_rng(cfg.rng_seed)
    ys = rng.choice(m, size=cfg.repetitions, p=probs)
    ys = np.minimum(ys, m - ys)  # y and M - y encode the same amplitude
    estimates = np.sin(np.pi * ys / m) ** 2
    return float(np.median(estimates))


def qae_error_bound(a: float, t: int, c: float) -> float:
    """The estimation error bound C (sqrt(a)/t + 1/t^2)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if c <= 0:
        raise ValueError("C must be positive")
    return c * (math.sqrt(a) / t + 1.0 / (t * t))
