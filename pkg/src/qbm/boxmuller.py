"""Box-Muller images of a uniform rectangular grid.

The sample multiset is the classical shadow of the grid superposition: all
N*N transform values of (U(j), V(k)) with uniform weight 1/N**2.  Three
arithmetic modes exist:

* exact        -- float64 evaluation of the closed-form transform,
* fixed point  -- every step routed through the funcapprox pipeline, so
                  truncation accumulates exactly as in a register machine,
* fixed point with exact dyadic polynomials -- the minimal-experiment
  variant where hand-picked dyadic coefficients make every intermediate an
  exact scaled integer and only the output store truncates.

Generation is a pure function of (GridConfig, mode): serialized output is
byte-identical across runs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import funcapprox as fa
from .errors import (
    DimensionMismatchError,
    FixedPointOverflowError,
    NonPositiveInputError,
    NotPositiveDefiniteError,
)
from .fixedpoint import FixedPointFormat, FxNum, fx_from_real, fx_mul

__all__ = [
    "GridConfig",
    "CorrelationSpec",
    "MultivariateSpec",
    "FixedPointPipeline",
    "standard_pipeline",
    "mini_pipeline",
    "BoxMullerSampleSet",
    "transform_point",
    "generate_samples",
    "correlate",
    "multivariate",
    "cholesky",
    "jacobian_check",
    "correlated_pdf",
]


@dataclass(frozen=True)
class GridConfig:
    """m-qubit-per-axis uniform grid over [u_min, u_max] x [v_min, v_max].

    midpoint: U(j) = u_min + (j + 1/2) (u_max - u_min) / N
    endpoint: U(j) = u_min + j (u_max - u_min) / (N - 1)

    The endpoint v-grid includes v = 1 when v_max = 1, which duplicates the
    v = 0 direction of the trig factors; that is a property of the endpoint
    convention, kept as such.  u_min = 0 is accepted at construction and
    rejected later by any pipeline that actually takes a logarithm at u = 0.
    """

    grid_qubits: int
    u_min: float
    u_max: float
    v_min: float = 0.0
    v_max: float = 1.0
    convention: str = "midpoint"

    def __post_init__(self) -> None:
        if self.grid_qubits < 1:
            raise ValueError("grid_qubits must be >= 1")
        if not 0.0 <= self.u_min < self.u_max <= 1.0:
            raise ValueError("need 0 <= u_min < u_max <= 1")
        if not 0.0 <= self.v_min < self.v_max <= 1.0:
            raise ValueError("need 0 <= v_min < v_max <= 1")
        if self.convention not in ("midpoint", "endpoint"):
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.convention == "endpoint" and self.grid_qubits < 1:
            raise ValueError("endpoint grid needs N >= 2")

    @property
    def n_per_axis(self) -> int:
        return 1 << self.grid_qubits

    def _axis(self, lo: float, hi: float) -> np.ndarray:
        n = self.n_per_axis
        if self.convention == "midpoint":
            return lo + (np.arange(n) + 0.5) * (hi - lo) / n
        return lo + np.arange(n) * (hi - lo) / (n - 1)

    def _axis_exact(self, lo: float, hi: float) -> list[Fraction]:
        n = self.n_per_axis
        lo_f, hi_f = Fraction(lo), Fraction(hi)
        if self.convention == "midpoint":
            return [lo_f + Fraction(2 * j + 1, 2 * n) * (hi_f - lo_f) for j in range(n)]
        return [lo_f + Fraction(j, n - 1) * (hi_f - lo_f) for j in range(n)]

    def u_values(self) -> np.ndarray:
        return self._axis(self.u_min, self.u_max)

    def v_values(self) -> np.ndarray:
        return self._axis(self.v_min, self.v_max)

    def u_values_exact(self) -> list[Fraction]:
        return self._axis_exact(self.u_min, self.u_max)

    def v_values_exact(self) -> list[Fraction]:
        return self._axis_exact(self.v_min, self.v_max)

    def to_dict(self) -> dict:
        return {
            "grid_qubits": self.grid_qubits,
            "u_min": self.u_min,
            "u_max": self.u_max,
            "v_min": self.v_min,
            "v_max": self.v_max,
            "convention": self.convention,
        }


@dataclass(frozen=True)
class CorrelationSpec:
    rho: float

    def __post_init__(self) -> None:
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("need |rho| <= 1")


@dataclass(frozen=True)
class MultivariateSpec:
    dim: int
    mean: tuple[float, ...]
    chol_lower: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        L = np.asarray(self.chol_lower, dtype=float)
        if L.shape != (self.dim, self.dim) or len(self.mean) != self.dim:
            raise DimensionMismatchError("mean/chol_lower shapes must match dim")
        if not np.allclose(L, np.tril(L)):
            raise ValueError("chol_lower must be lower-triangular")
        if np.any(np.diag(L) <= 0):
            raise ValueError("chol_lower needs a positive diagonal")


@dataclass(frozen=True)
class FixedPointPipeline:
    """Fixed-point arithmetic route for the transform.

    With ln_spec/sqrt_spec set, the radius follows the register pipeline
    w = ln(u); w = -2 * w; r = sqrt(w), where the two w steps live in a
    range-widened register (same resolution, range_headroom extra integer
    bits) so small u does not overflow a narrow integer part.  With
    radial_spec set, r = poly(u) directly.  exact_dyadic switches the
    polynomial evaluations to exact rational arithmetic with one final
    truncation per output, emulating integer arithmetic rescaled at the
    end.
    """

    format: FixedPointFormat
    sin_spec: fa.PiecewisePolySpec
    ln_spec: fa.PiecewisePolySpec | None = None
    sqrt_spec: fa.PiecewisePolySpec | None = None
    radial_spec: fa.PiecewisePolySpec | None = None
    range_headroom: int = 3
    exact_dyadic: bool = False

    def __post_init__(self) -> None:
        direct = self.radial_spec is not None
        via_log = self.ln_spec is not None and self.sqrt_spec is not None
        if direct == via_log:
            raise ValueError("set either radial_spec or both ln_spec and sqrt_spec")
        if self.exact_dyadic and not direct:
            raise ValueError("exact_dyadic evaluation requires a direct radial_spec")

    @property
    def uses_log(self) -> bool:
        return self.radial_spec is None

    def describe(self) -> dict:
        return {
            "word_bits": self.format.word_bits,
            "int_bits": self.format.int_bits,
            "pieces": self.sin_spec.pieces,
            "degree": self.sin_spec.degree,
            "radial": "log_sqrt" if self.uses_log else "direct_poly",
            "range_headroom": self.range_headroom,
            "exact_dyadic": self.exact_dyadic,
        }


def standard_pipeline(
    fmt: FixedPointFormat,
    pieces: int = 32,
    degree: int = 1,
    range_headroom: int = 3,
) -> FixedPointPipeline:
    """Chebyshev-fitted sin / ln / sqrt specs at the given (M, d)."""
    return FixedPointPipeline(
        format=fmt,
        sin_spec=fa.build_poly_spec("sin2pi", fmt, pieces, degree),
        ln_spec=fa.build_poly_spec("ln", fmt, pieces, degree),
        sqrt_spec=fa.build_poly_spec("sqrt", fmt, pieces, degree),
        range_headroom=range_headroom,
    )


def mini_pipeline(word_bits: int = 5, int_bits: int = 3) -> FixedPointPipeline:
    """The 5-bit minimal experiment: linear sin and radius, exact dyadics."""
    fmt = FixedPointFormat(word_bits, int_bits)
    return FixedPointPipeline(
        format=fmt,
        sin_spec=fa.mini_sin_spec(fmt),
        radial_spec=fa.mini_radial_spec(fmt),
        exact_dyadic=True,
    )


def mini_grid(grid_qubits: int = 5) -> GridConfig:
    """Integer grid u, v = j/N for j = 0..N-1 (endpoint over [0, (N-1)/N])."""
    n = 1 << grid_qubits
    hi = (n - 1) / n
    return GridConfig(grid_qubits, 0.0, hi, 0.0, hi, convention="endpoint")


@dataclass(frozen=True)
class BoxMullerSampleSet:
    """All N*N transform values in (j, k) row-major order, weight 1/N**2."""

    config: GridConfig
    mode: str
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    z1: np.ndarray = field(repr=False)
    z2: np.ndarray = field(repr=False)
    z1_raw: np.ndarray | None = field(default=None, repr=False)
    z2_raw: np.ndarray | None = field(default=None, repr=False)
    pipeline: FixedPointPipeline | None = None

    def __len__(self) -> int:
        return len(self.z1)

    @property
    def weight(self) -> float:
        return 1.0 / len(self)

    def pairs(self) -> np.ndarray:
        return np.column_stack([self.z1, self.z2])

    def pooled(self) -> np.ndarray:
        """z1 and z2 flattened into one sample list (both are N(0,1))."""
        return np.concatenate([self.z1, self.z2])

    def to_csv(self, path: str) -> None:
        n = self.config.n_per_axis
        with_raw = self.z1_raw is not None
        header = "j,k,u,v,z1,z2" + (",z1_raw,z2_raw" if with_raw else "")
        lines = [header]
        for idx in range(len(self)):
            j, k = divmod(idx, n)
            row = (
                f"{j},{k},{float(self.u[idx])!r},{float(self.v[idx])!r},"
                f"{float(self.z1[idx])!r},{float(self.z2[idx])!r}"
            )
            if with_raw:
                row += f",{int(self.z1_raw[idx])},{int(self.z2_raw[idx])}"
            lines.append(row)
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    def to_json(self, path: str) -> None:
        doc = {
            "config": self.config.to_dict(),
            "mode": self.mode,
            "pipeline": self.pipeline.describe() if self.pipeline else None,
            "z1": [float(x) for x in self.z1],
            "z2": [float(x) for x in self.z2],
        }
        if self.z1_raw is not None:
            doc["z1_raw"] = [int(x) for x in self.z1_raw]
            doc["z2_raw"] = [int(x) for x in self.z2_raw]
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True)
            fh.write("\n")


def transform_point(u: float, v: float) -> tuple[float, float]:
    """The closed-form transform of one uniform pair."""
    if u <= 0.0:
        raise NonPositiveInputError("transform needs u > 0")
    r = math.sqrt(-2.0 * math.log(u))
    return r * math.sin(2.0 * math.pi * v), r * math.cos(2.0 * math.pi * v)


def _radial_fx(pipe: FixedPointPipeline, u_fx: FxNum) -> FxNum:
    if pipe.uses_log:
        wide = pipe.format.widened(pipe.range_headroom)
        ln2c = fx_from_real(math.log(2.0), wide)
        neg2 = fx_from_real(-2.0, wide)
        w = fx_mul(fa.ln_fx(u_fx, pipe.ln_spec, ln2c), neg2)
        if w.raw < 0:
            # approximation error near u = 1 can push the log a step above
            # zero; the radicand register is clamped at 0 there
            w = FxNum(wide, 0)
        return fa.sqrt_fx(w, pipe.sqrt_spec)
    return fa.eval_poly(pipe.radial_spec, u_fx)


def _generate_fixedpoint(cfg: GridConfig, pipe: FixedPointPipeline) -> BoxMullerSampleSet:
    fmt = pipe.format
    n = cfg.n_per_axis

    if pipe.exact_dyadic:
        res = Fraction(1, 1 << fmt.frac_bits)
        u_ex = cfg.u_values_exact()
        v_ex = cfg.v_values_exact()
        if pipe.uses_log and min(u_ex) <= 0:
            raise NonPositiveInputError("log pipeline needs u > 0 on the whole grid")
        r_ex = [fa.eval_poly_fraction(pipe.radial_spec, u) for u in u_ex]
        s_ex, c_ex = [], []
        for v in v_ex:
            sign, xf = fa.fold_quarter_exact(v)
            s_ex.append(sign * fa.eval_poly_fraction(pipe.sin_spec, xf))
            sign_c, xc = fa.fold_quarter_exact((Fraction(1, 4) - v) % 1)
            c_ex.append(sign_c * fa.eval_poly_fraction(pipe.sin_spec, xc))
        z1_raw = np.empty(n * n, dtype=np.int64)
        z2_raw = np.empty(n * n, dtype=np.int64)
        for j, r in enumerate(r_ex):
            for k in range(n):
                z1_raw[j * n + k] = math.floor((r * s_ex[k]) / res)
                z2_raw[j * n + k] = math.floor((r * c_ex[k]) / res)
        if max(np.abs(z1_raw).max(), np.abs(z2_raw).max()) > fmt.max_raw:
            raise FixedPointOverflowError("output register overflow")
        u_used = np.array([float(x) for x in u_ex])
        v_used = np.array([float(x) for x in v_ex])
    else:
        u_fx = [fx_from_real(float(x), fmt) for x in cfg.u_values()]
        v_fx = [fx_from_real(float(x), fmt) for x in cfg.v_values()]
        if pipe.uses_log:
            umin_q = min(x.raw for x in u_fx)
            if umin_q <= 0:
                raise NonPositiveInputError(
                    "grid u values quantize to 0; raise u_min above one resolution step"
                )
            r_peak = math.sqrt(-2.0 * math.log(umin_q * fmt.resolution))
            if r_peak >= 2.0 ** (fmt.int_bits - 1):
                raise FixedPointOverflowError(
                    f"sqrt(-2 ln u_min) = {r_peak:.3f} is not representable in {fmt}"
                )
        r_raw = np.array([_radial_fx(pipe, x).raw for x in u_fx], dtype=np.int64)
        s_raw = np.array([fa.sin2pi_fx(x, pipe.sin_spec).raw for x in v_fx], dtype=np.int64)
        c_raw = np.array([fa.cos2pi_fx(x, pipe.sin_spec).raw for x in v_fx], dtype=np.int64)
        z1_raw = ((r_raw[:, None] * s_raw[None, :]) >> fmt.frac_bits).ravel()
        z2_raw = ((r_raw[:, None] * c_raw[None, :]) >> fmt.frac_bits).ravel()
        if max(np.abs(z1_raw).max(), np.abs(z2_raw).max()) > fmt.max_raw:
            raise FixedPointOverflowError("output register overflow")
        u_used = np.array([x.value for x in u_fx])
        v_used = np.array([x.value for x in v_fx])

    resolution = fmt.resolution
    return BoxMullerSampleSet(
        config=cfg,
        mode="fixedpoint",
        u=np.repeat(u_used, n),
        v=np.tile(v_used, n),
        z1=z1_raw * resolution,
        z2=z2_raw * resolution,
        z1_raw=z1_raw,
        z2_raw=z2_raw,
        pipeline=pipe,
    )


def generate_samples(cfg: GridConfig, mode: str | FixedPointPipeline = "exact") -> BoxMullerSampleSet:
    """All N*N transform images of the grid, in (j, k) row-major order."""
    if isinstance(mode, FixedPointPipeline):
        return _generate_fixedpoint(cfg, mode)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    u = cfg.u_values()
    v = cfg.v_values()
    if np.any(u <= 0.0):
        raise NonPositiveInputError("exact transform needs u > 0 on the whole grid")
    r = np.sqrt(-2.0 * np.log(u))
    s = np.sin(2.0 * np.pi * v)
    c = np.cos(2.0 * np.pi * v)
    n = cfg.n_per_axis
    return BoxMullerSampleSet(
        config=cfg,
        mode="exact",
        u=np.repeat(u, n),
        v=np.tile(v, n),
        z1=np.outer(r, s).ravel(),
        z2=np.outer(r, c).ravel(),
    )


def correlate(samples: BoxMullerSampleSet, spec: CorrelationSpec) -> BoxMullerSampleSet:
    """Apply (x1, x2) = (z1, rho z1 + sqrt(1 - rho^2) z2) pairwise.

    Operates on real values; raw words do not survive because the mixing
    is a post-processing rotation, not part of the register pipeline.
    """
    rho = spec.rho
    x2 = rho * samples.z1 + math.sqrt(1.0 - rho * rho) * samples.z2
    return BoxMullerSampleSet(
        config=samples.config,
        mode=f"{samples.mode}+rho={rho!r}",
        u=samples.u,
        v=samples.v,
        z1=samples.z1.copy(),
        z2=x2,
        pipeline=samples.pipeline,
    )


def multivariate(pair_sets: list[BoxMullerSampleSet], spec: MultivariateSpec) -> np.ndarray:
    """Stack ceil(D/2) standard pairs and apply x = mean + L z per point."""
    need = (spec.dim + 1) // 2
    if len(pair_sets) != need:
        raise DimensionMismatchError(f"need {need} pair sets for dim {spec.dim}")
    length = len(pair_sets[0])
    if any(len(s) != length for s in pair_sets):
        raise DimensionMismatchError("pair sets must have equal length")
    cols = []
    for s in pair_sets:
        cols.append(s.z1)
        cols.append(s.z2)
    z = np.column_stack(cols[: spec.dim])
    L = np.asarray(spec.chol_lower, dtype=float)
    return np.asarray(spec.mean, dtype=float) + z @ L.T


def cholesky(cov: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L L^T = cov (symmetric positive-definite)."""
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise NotPositiveDefiniteError("covariance must be square")
    if not np.allclose(cov, cov.T, rtol=1e-12, atol=1e-12):
        raise NotPositiveDefiniteError("covariance must be symmetric")
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc


def _correlated_point(u: float, v: float, rho: float) -> tuple[float, float]:
    z1, z2 = transform_point(u, v)
    return z1, rho * z1 + math.sqrt(1.0 - rho * rho) * z2


def jacobian_check(u: float, v: float, rho: float) -> tuple[float, float]:
    """Analytic |d(x1,x2)/d(u,v)| = 2 pi sqrt(1-rho^2)/u vs central differences."""
    analytic = 2.0 * math.pi * math.sqrt(1.0 - rho * rho) / u
    h = 1e-6
    x1u_p, x2u_p = _correlated_point(u + h, v, rho)
    x1u_m, x2u_m = _correlated_point(u - h, v, rho)
    x1v_p, x2v_p = _correlated_point(u, v + h, rho)
    x1v_m, x2v_m = _correlated_point(u, v - h, rho)
    d11 = (x1u_p - x1u_m) / (2 * h)
    d21 = (x2u_p - x2u_m) / (2 * h)
    d12 = (x1v_p - x1v_m) / (2 * h)
    d22 = (x2v_p - x2v_m) / (2 * h)
    numeric = abs(d11 * d22 - d12 * d21)
    return analytic, numeric


def correlated_pdf(x1: float, x2: float, rho: float) -> float:
    """Density of the correlated standard bivariate normal."""
    q = 1.0 - rho * rho
    return math.exp(-(x1 * x1 - 2.0 * rho * x1 * x2 + x2 * x2) / (2.0 * q)) / (
        2.0 * math.pi * math.sqrt(q)
    )
