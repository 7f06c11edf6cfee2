"""Bit-exact signed fixed-point arithmetic.

Emulates an (n, p) register: an n-bit two's-complement word with p bits
ahead of the binary point, so the spacing of representable values is
2**(p - n).  Every rounding is truncation toward -inf and every overflow is
an explicit error; identical inputs give identical raw words on any
platform.

Overflow detection is symmetric: the most negative two's-complement word is
rejected, so valid raws are -(2**(n-1) - 1) .. 2**(n-1) - 1 and every
representable value x satisfies |x| < 2**(p - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import FixedPointOverflowError, NonPositiveInputError

__all__ = [
    "FixedPointFormat",
    "FxNum",
    "fx_from_real",
    "fx_add",
    "fx_sub",
    "fx_neg",
    "fx_mul",
    "fx_shift",
    "fx_convert",
    "leading_bit_index",
]


@dataclass(frozen=True)
class FixedPointFormat:
    """An (n, p) word layout: n total bits, p bits before the binary point."""

    word_bits: int
    int_bits: int

    def __post_init__(self) -> None:
        if not 1 <= self.int_bits < self.word_bits:
            raise ValueError(
                f"need 1 <= int_bits < word_bits, got ({self.word_bits}, {self.int_bits})"
            )

    @property
    def frac_bits(self) -> int:
        return self.word_bits - self.int_bits

    @property
    def resolution(self) -> float:
        return 2.0 ** (self.int_bits - self.word_bits)

    @property
    def max_raw(self) -> int:
        # symmetric range: the raw -2**(n-1) is not a valid word
        return (1 << (self.word_bits - 1)) - 1

    def widened(self, extra_int_bits: int) -> "FixedPointFormat":
        """Same resolution, extra_int_bits more range (wider register)."""
        return FixedPointFormat(self.word_bits + extra_int_bits, self.int_bits + extra_int_bits)


@dataclass(frozen=True)
class FxNum:
    """A fixed-point number: raw two's-complement word plus its format."""

    format: FixedPointFormat
    raw: int

    def __post_init__(self) -> None:
        if abs(self.raw) > self.format.max_raw:
            raise FixedPointOverflowError(
                f"raw {self.raw} outside +/-{self.format.max_raw} of {self.format}"
            )

    @property
    def value(self) -> float:
        return self.raw * self.format.resolution

    @property
    def exact(self) -> Fraction:
        return Fraction(self.raw, 1 << self.format.frac_bits)


def _check_raw(raw: int, fmt: FixedPointFormat, what: str) -> FxNum:
    if abs(raw) > fmt.max_raw:
        raise FixedPointOverflowError(f"{what} overflows {fmt}: raw {raw}")
    return FxNum(fmt, raw)


def fx_from_real(x: float | Fraction, fmt: FixedPointFormat) -> FxNum:
    """Quantize x by truncation toward -inf onto the format grid."""
    if isinstance(x, Fraction):
        raw = (x.numerator << fmt.frac_bits) // x.denominator
    else:
        raw = math.floor(x / fmt.resolution)
    return _check_raw(raw, fmt, f"value {x}")


def fx_add(a: FxNum, b: FxNum) -> FxNum:
    if a.format != b.format:
        raise ValueError("fx_add requires matching formats")
    return _check_raw(a.raw + b.raw, a.format, "sum")


def fx_neg(a: FxNum) -> FxNum:
    return FxNum(a.format, -a.raw)


def fx_sub(a: FxNum, b: FxNum) -> FxNum:
    if a.format != b.format:
        raise ValueError("fx_sub requires matching formats")
    return _check_raw(a.raw - b.raw, a.format, "difference")


def fx_mul(a: FxNum, b: FxNum) -> FxNum:
    """Exact product truncated toward -inf onto the format grid.

    Python's >> on negative ints is an arithmetic (floor) shift, which is
    exactly the truncation a dropped-low-bits product register performs.
    """
    if a.format != b.format:
        raise ValueError("fx_mul requires matching formats")
    raw = (a.raw * b.raw) >> a.format.frac_bits
    return _check_raw(raw, a.format, "product")


def fx_shift(a: FxNum, k: int) -> FxNum:
    """Multiply by 2**k.  Left shifts are exact; right shifts floor."""
    raw = a.raw << k if k >= 0 else a.raw >> (-k)
    return _check_raw(raw, a.format, f"shift by 2**{k}")


def fx_convert(a: FxNum, fmt: FixedPointFormat) -> FxNum:
    """Move a value into another format of identical resolution."""
    if fmt.int_bits - fmt.word_bits != a.format.int_bits - a.format.word_bits:
        raise ValueError("fx_convert requires identical resolution")
    return _check_raw(a.raw, fmt, "converted value")


def leading_bit_index(a: FxNum) -> int:
    """Return k = ceil(log2 value(a)), so value(a) / 2**k is in (1/2, 1]."""
    if a.raw <= 0:
        raise NonPositiveInputError(f"leading_bit_index needs a > 0, got raw {a.raw}")
    # ceil(log2 r) for a positive integer r is (r - 1).bit_length()
    return (a.raw - 1).bit_length() + (a.format.int_bits - a.format.word_bits)
