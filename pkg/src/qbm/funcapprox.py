"""Piecewise-polynomial fixed-point evaluation of sin, cos, ln and sqrt.

Each target is approximated on its reduced domain by M equal-width pieces
carrying a degree-d Chebyshev interpolant.  Coefficients are quantized to
the working resolution at build time; evaluation is Horner entirely in
fixed point (d multiply-truncate steps per call), so the software error
budget includes coefficient quantization and per-step truncation exactly
as a reversible-arithmetic implementation would.

Coefficients are quantized to the format's *resolution* but stored with
unbounded integer range, and the Horner accumulator is likewise wide: a
constant multiplier in a circuit is classically conditioned and may carry
more integer bits than the data path.  Only the final result must fit the
working format.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import (
    DomainSingularityError,
    FixedPointOverflowError,
    NegativeInputError,
    NonPositiveInputError,
    OutOfDomainError,
)
from .fixedpoint import (
    FixedPointFormat,
    FxNum,
    fx_add,
    fx_convert,
    fx_from_real,
    fx_mul,
    leading_bit_index,
)

__all__ = [
    "PiecewisePolySpec",
    "build_poly_spec",
    "default_domain",
    "eval_poly",
    "eval_poly_real",
    "sin2pi_fx",
    "cos2pi_fx",
    "ln_fx",
    "sqrt_fx",
    "approx_error_report",
    "fold_quarter_exact",
    "mini_sin_spec",
    "mini_radial_spec",
    "target_function",
]

_TARGETS: dict[str, Callable[[float], float]] = {
    "sin2pi": lambda x: math.sin(2.0 * math.pi * x),
    "cos2pi": lambda x: math.cos(2.0 * math.pi * x),
    "ln": math.log,
    "sqrt": math.sqrt,
    "sqrt_neg2ln": lambda x: math.sqrt(-2.0 * math.log(x)),
}

_DEFAULT_DOMAINS = {
    "sin2pi": (0.0, 0.25),
    "cos2pi": (0.0, 0.25),
    "ln": (0.5, 1.0),
    "sqrt": (0.25, 1.0),
    "sqrt_neg2ln": (0.0, 1.0),
}


def target_function(name: str) -> Callable[[float], float]:
    try:
        return _TARGETS[name]
    except KeyError:
        raise ValueError(f"unknown target {name!r}") from None


def default_domain(target: str) -> tuple[float, float]:
    return _DEFAULT_DOMAINS[target]


@dataclass(frozen=True)
class PiecewisePolySpec:
    """M-piece, degree-d polynomial table over a fixed domain.

    coeff_raw[i][j] is the coefficient of x**j on piece i, as an integer
    multiple of the format resolution.  When exact_coeffs is set the
    coefficients are kept as exact dyadic rationals instead (used for the
    hand-picked linear approximations of the minimal experiment, whose
    arithmetic is integer-exact until the final store).
    """

    target: str
    pieces: int
    degree: int
    domain: tuple[float, float]
    format: FixedPointFormat
    coeff_raw: tuple[tuple[int, ...], ...] | None
    coeff_exact: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self) -> None:
        if self.pieces < 1 or self.pieces & (self.pieces - 1):
            raise ValueError("pieces must be a power of two")
        if self.degree < 0:
            raise ValueError("degree must be >= 0")

    @property
    def exact(self) -> bool:
        return self.coeff_exact is not None

    @property
    def piece_width(self) -> float:
        a, b = self.domain
        return (b - a) / self.pieces

    def piece_index(self, x: float) -> int:
        a, _ = self.domain
        idx = int((x - a) / self.piece_width)
        return min(max(idx, 0), self.pieces - 1)

    def coefficients(self, piece: int) -> list[float]:
        if self.exact:
            return [float(c) for c in self.coeff_exact[piece]]
        res = self.format.resolution
        return [c * res for c in self.coeff_raw[piece]]

    def to_json(self) -> str:
        doc = {
            "target": self.target,
            "pieces": self.pieces,
            "degree": self.degree,
            "domain": list(self.domain),
            "format": {"word_bits": self.format.word_bits, "int_bits": self.format.int_bits},
            "coeff_raw": [list(row) for row in self.coeff_raw] if self.coeff_raw else None,
            "coeff_exact": (
                [[str(c) for c in row] for row in self.coeff_exact] if self.coeff_exact else None
            ),
        }
        return json.dumps(doc, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "PiecewisePolySpec":
        doc = json.loads(text)
        fmt = FixedPointFormat(doc["format"]["word_bits"], doc["format"]["int_bits"])
        raw = doc["coeff_raw"]
        exact = doc["coeff_exact"]
        return PiecewisePolySpec(
            target=doc["target"],
            pieces=doc["pieces"],
            degree=doc["degree"],
            domain=tuple(doc["domain"]),
            format=fmt,
            coeff_raw=tuple(tuple(row) for row in raw) if raw else None,
            coeff_exact=tuple(tuple(Fraction(c) for c in row) for row in exact) if exact else None,
        )


def _chebyshev_nodes(a: float, b: float, count: int) -> np.ndarray:
    i = np.arange(count)
    return 0.5 * (a + b) + 0.5 * (b - a) * np.cos(np.pi * (2 * i + 1) / (2 * count))


def _validate_domain(target: str, domain: tuple[float, float]) -> None:
    a, b = domain
    if not a < b:
        raise ValueError(f"empty domain {domain}")
    if target == "ln" and a <= 0.0:
        raise DomainSingularityError("ln is singular at 0")
    if target == "sqrt" and a < 0.0:
        raise DomainSingularityError("sqrt undefined for negative arguments")
    if target == "sqrt_neg2ln" and (a <= 0.0 or b > 1.0):
        raise DomainSingularityError("sqrt(-2 ln x) needs 0 < x <= 1")


def build_poly_spec(
    target: str,
    fmt: FixedPointFormat,
    pieces: int,
    degree: int,
    domain: tuple[float, float] | None = None,
    override_coeffs: list[list[float]] | None = None,
) -> PiecewisePolySpec:
    """Fit (or adopt) per-piece polynomials and quantize them to fmt.

    Fitted coefficients come from Chebyshev-node interpolation of the
    target on each piece, expressed in the monomial basis of the absolute
    argument and truncated to the format resolution.  override_coeffs
    bypasses fitting and keeps the given dyadic coefficients exact.
    """
    if target not in _TARGETS:
        raise ValueError(f"unknown target {target!r}")
    if domain is None:
        domain = _DEFAULT_DOMAINS[target]

    if override_coeffs is not None:
        exact = tuple(tuple(Fraction(c) for c in row) for row in override_coeffs)
        if len(exact) != pieces or any(len(row) != degree + 1 for row in exact):
            raise ValueError("override_coeffs must be pieces x (degree+1)")
        return PiecewisePolySpec(target, pieces, degree, domain, fmt, None, exact)

    _validate_domain(target, domain)
    f = _TARGETS[target]
    a, b = domain
    width = (b - a) / pieces
    rows = []
    for i in range(pieces):
        lo = a + i * width
        nodes = _chebyshev_nodes(lo, lo + width, degree + 1)
        values = np.array([f(x) for x in nodes])
        mono = np.polynomial.polynomial.polyfit(nodes, values, degree)
        rows.append(tuple(math.floor(c / fmt.resolution) for c in mono))
    return PiecewisePolySpec(target, pieces, degree, domain, fmt, tuple(rows))


def _check_domain(spec: PiecewisePolySpec, x_value: float) -> None:
    a, b = spec.domain
    if not a <= x_value <= b:
        raise OutOfDomainError(f"{x_value} outside [{a}, {b}] of {spec.target} spec")


def eval_poly(spec: PiecewisePolySpec, x: FxNum) -> FxNum:
    """Horner evaluation of the selected piece, d multiply-truncates deep."""
    _check_domain(spec, x.value)
    fmt = spec.format
    frac = fmt.frac_bits
    if spec.exact:
        # integer-exact path: dyadic coefficients, single final truncation
        row = spec.coeff_exact[spec.piece_index(x.value)]
        acc = row[-1]
        xe = x.exact
        for c in reversed(row[:-1]):
            acc = acc * xe + c
        raw = (acc.numerator << frac) // acc.denominator
        if abs(raw) > fmt.max_raw:
            raise FixedPointOverflowError(f"eval_poly result {float(acc)} overflows {fmt}")
        return FxNum(fmt, raw)

    row = spec.coeff_raw[spec.piece_index(x.value)]
    acc = row[-1]  # wide accumulator, resolution 2**(p-n)
    for c in reversed(row[:-1]):
        acc = ((acc * x.raw) >> frac) + c
    if abs(acc) > fmt.max_raw:
        raise FixedPointOverflowError(f"eval_poly result raw {acc} overflows {fmt}")
    return FxNum(fmt, acc)


def eval_poly_fraction(spec: PiecewisePolySpec, x: Fraction) -> Fraction:
    """Exact-rational Horner for specs carrying exact dyadic coefficients."""
    if not spec.exact:
        raise ValueError("eval_poly_fraction needs an exact-coefficient spec")
    _check_domain(spec, float(x))
    row = spec.coeff_exact[spec.piece_index(float(x))]
    acc = row[-1]
    for c in reversed(row[:-1]):
        acc = acc * x + c
    return acc


def eval_poly_real(spec: PiecewisePolySpec, x: float) -> float:
    """Same polynomial evaluated in floats (no quantization of the result)."""
    _check_domain(spec, x)
    row = spec.coefficients(spec.piece_index(x))
    acc = row[-1]
    for c in reversed(row[:-1]):
        acc = acc * x + c
    return acc


def _fold_quarter_raw(x: FxNum) -> tuple[int, int]:
    """Fold x in [0, 1] to the sin argument in [0, 1/4]; returns (sign, raw)."""
    fmt = x.format
    if fmt.frac_bits < 2:
        raise ValueError("sin/cos folding needs at least 2 fractional bits")
    quarter = 1 << (fmt.frac_bits - 2)
    one = quarter << 2
    r = x.raw
    if r < 0 or r > one:
        raise OutOfDomainError(f"sin/cos argument {x.value} outside [0, 1]")
    if r <= quarter:
        return 1, r
    if r <= 2 * quarter:
        return 1, 2 * quarter - r
    if r <= 3 * quarter:
        return -1, r - 2 * quarter
    return -1, one - r


def fold_quarter_exact(x: Fraction) -> tuple[int, Fraction]:
    """Exact-rational version of the quarter-period fold."""
    if x < 0 or x > 1:
        raise OutOfDomainError(f"sin/cos argument {x} outside [0, 1]")
    q = Fraction(1, 4)
    if x <= q:
        return 1, x
    if x <= 2 * q:
        return 1, 2 * q - x
    if x <= 3 * q:
        return -1, x - 2 * q
    return -1, 1 - x


def sin2pi_fx(x: FxNum, spec: PiecewisePolySpec) -> FxNum:
    """sin(2 pi x) for x in [0, 1]: quarter-period fold, then the spec."""
    sign, raw = _fold_quarter_raw(x)
    y = eval_poly(spec, FxNum(x.format, raw))
    return FxNum(y.format, sign * y.raw)


def cos2pi_fx(x: FxNum, spec: PiecewisePolySpec) -> FxNum:
    """cos(2 pi x) via the shift identity cos(2 pi x) = sin(2 pi (1/4 - x))."""
    fmt = x.format
    quarter = 1 << (fmt.frac_bits - 2)
    one = quarter << 2
    if x.raw < 0 or x.raw > one:
        raise OutOfDomainError(f"cos argument {x.value} outside [0, 1]")
    shifted = quarter - x.raw
    if shifted < 0:
        shifted += one
    return sin2pi_fx(FxNum(fmt, shifted), spec)


def ln_fx(x: FxNum, spec: PiecewisePolySpec, ln2_const: FxNum) -> FxNum:
    """ln x for 0 < x <= 1 by leading-bit range reduction.

    The result lands in ln2_const's format, which may be a range-widened
    twin of x's format (same resolution, more integer bits) so that
    k * ln 2 fits for small x.
    """
    if x.raw <= 0:
        raise NonPositiveInputError("ln_fx needs x > 0")
    if x.value > 1.0:
        raise OutOfDomainError("ln_fx expects x <= 1")
    out_fmt = ln2_const.format
    k = leading_bit_index(x)
    xstar = FxNum(x.format, x.raw << (-k))  # exact: k <= 0 here
    poly = fx_convert(eval_poly(spec, xstar), out_fmt)
    k_fx = fx_from_real(float(k), out_fmt)
    return fx_add(poly, fx_mul(k_fx, ln2_const))


def sqrt_fx(x: FxNum, spec: PiecewisePolySpec) -> FxNum:
    """sqrt by even-exponent range reduction into [1/4, 1).

    Picks even e with x * 2**-e in [1/4, 1), evaluates the spec there and
    unfolds with the exact power-of-two multiplier 2**(e/2).  Register
    shifts floor, like every other truncation here.  The result is
    range-checked against the spec's (base) format.
    """
    if x.raw < 0:
        raise NegativeInputError("sqrt_fx needs x >= 0")
    base = spec.format
    if x.raw == 0:
        return FxNum(base, 0)
    t = (x.raw.bit_length() - 1) + (x.format.int_bits - x.format.word_bits)
    e = t + 2 if t % 2 == 0 else t + 1
    folded_raw = x.raw >> e if e >= 0 else x.raw << (-e)
    y = eval_poly(spec, FxNum(base, folded_raw))
    half = e // 2
    raw = y.raw << half if half >= 0 else y.raw >> (-half)
    if abs(raw) > base.max_raw:
        raise FixedPointOverflowError("sqrt_fx result overflows")
    return FxNum(base, raw)


def approx_error_report(spec: PiecewisePolySpec, probes: int) -> float:
    """Max |fixed-point evaluation - target| over equispaced probes.

    Probes are quantized into the spec's format first, and the reference
    is the true target at the quantized point, so the report measures the
    arithmetic pipeline rather than input rounding.
    """
    if probes < 2:
        raise ValueError("need at least 2 probes")
    f = _TARGETS[spec.target]
    a, b = spec.domain
    worst = 0.0
    for i in range(probes):
        xq = fx_from_real(a + (b - a) * i / (probes - 1), spec.format)
        if not a <= xq.value <= b:
            continue
        if spec.target in ("ln", "sqrt_neg2ln") and xq.value <= 0.0:
            continue  # quantized probe fell on the log singularity
        worst = max(worst, abs(eval_poly(spec, xq).value - f(xq.value)))
    return worst


def mini_sin_spec(fmt: FixedPointFormat) -> PiecewisePolySpec:
    """The hand-picked linear sine: sin(2 pi x) ~ 1/8 + 4x on [0, 1/4]."""
    return build_poly_spec("sin2pi", fmt, 1, 1, (0.0, 0.25), override_coeffs=[[0.125, 4.0]])


def mini_radial_spec(fmt: FixedPointFormat) -> PiecewisePolySpec:
    """The hand-picked linear radius: sqrt(-2 ln x) ~ 2.5 (1 - x) on [0, 1]."""
    return build_poly_spec("sqrt_neg2ln", fmt, 1, 1, (0.0, 1.0), override_coeffs=[[2.5, -2.5]])
