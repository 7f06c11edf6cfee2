"""Sample-quality metrics: exponential-expectation error and quantile RMS.

Both metrics treat the pooled multiset z1 union z2 as draws from what
should be a standard normal.  The quantile convention is the common
type-7 rule (linear interpolation between order statistics); the quantile
error is a true root mean square over the 19 probability levels, so a
uniform shift of every sample by delta scores exactly delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boxmuller import BoxMullerSampleSet
from .errors import EmptySampleError, ProbabilityRangeError, TooFewSamplesError

__all__ = [
    "MetricReport",
    "QUANTILE_LEVELS",
    "exp_error",
    "quantile_error",
    "inverse_normal_cdf",
    "report",
]

QUANTILE_LEVELS = tuple(k / 20 for k in range(1, 20))  # 0.05 .. 0.95

_HIST_RANGE = (-4.0, 4.0)
_HIST_BINS = 64
_QQ_LEVELS = tuple(k / 100 for k in range(1, 100))


@dataclass(frozen=True)
class MetricReport:
    eps_exp: float
    eps_quantile: float
    mean: tuple[float, float]
    std: tuple[float, float]
    pearson: float
    sample_count: int
    qq: tuple[tuple[float, float, float], ...]  # (p, q_exact, q_sample)
    histogram: tuple[tuple[float, float, int], ...]  # (bin_left, bin_right, count)

    def to_dict(self) -> dict:
        return {
            "eps_exp": self.eps_exp,
            "eps_quantile": self.eps_quantile,
            "mean": list(self.mean),
            "std": list(self.std),
            "pearson": self.pearson,
            "sample_count": self.sample_count,
        }


# Acklam's rational starting guess for the normal quantile function.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def inverse_normal_cdf(p: float) -> float:
    """Standard normal quantile, rational guess plus one Newton step."""
    if not 0.0 < p < 1.0:
        raise ProbabilityRangeError(f"p must be in (0, 1), got {p}")
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    elif p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        x = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
            ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        )
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    # one Newton refinement against erfc pins the residual near roundoff
    return x - (_normal_cdf(x) - p) / _normal_pdf(x)


def exp_error(samples: np.ndarray) -> float:
    """Relative error of mean(exp(z)) against the lognormal mean e^(1/2)."""
    z = np.asarray(samples, dtype=float)
    if z.size == 0:
        raise EmptySampleError("exp_error needs at least one sample")
    target = math.exp(0.5)
    return abs(float(np.mean(np.exp(z))) - target) / target


def quantile_error(samples: np.ndarray) -> float:
    """RMS over p = 0.05..0.95 of exact minus type-7 sample quantiles."""
    z = np.asarray(samples, dtype=float)
    if z.size < 20:
        raise TooFewSamplesError("quantile_error needs at least 20 samples")
    levels = np.array(QUANTILE_LEVELS)
    q_sample = np.quantile(z, levels, method="linear")
    q_exact = np.array([inverse_normal_cdf(p) for p in levels])
    return float(np.sqrt(np.mean((q_exact - q_sample) ** 2)))


def report(samples: BoxMullerSampleSet) -> MetricReport:
    """Full quality report over a sample set (metrics pool z1 and z2)."""
    if len(samples) == 0:
        raise EmptySampleError("empty sample set")
    pooled = samples.pooled()
    q_rows = []
    for p in _QQ_LEVELS:
        q_rows.append(
            (p, inverse_normal_cdf(p), float(np.quantile(pooled, p, method="linear")))
        )
    counts, edges = np.histogram(pooled, bins=_HIST_BINS, range=_HIST_RANGE)
    hist = tuple(
        (float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(_HIST_BINS)
    )
    if np.std(samples.z1) == 0.0 or np.std(samples.z2) == 0.0:
        pearson = 0.0
    else:
        pearson = float(np.corrcoef(samples.z1, samples.z2)[0, 1])
    return MetricReport(
        eps_exp=exp_error(pooled),
        eps_quantile=quantile_error(pooled),
        mean=(float(np.mean(samples.z1)), float(np.mean(samples.z2))),
        std=(float(np.std(samples.z1)), float(np.std(samples.z2))),
        pearson=pearson,
        sample_count=int(pooled.size),
        qq=tuple(q_rows),
        histogram=hist,
    )
