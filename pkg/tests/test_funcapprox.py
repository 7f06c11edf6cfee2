import math
from fractions import Fraction

import numpy as np
import pytest

from qbm.errors import (
    DomainSingularityError,
    NonPositiveInputError,
    OutOfDomainError,
)
from qbm.fixedpoint import FixedPointFormat, FxNum, fx_add, fx_from_real, fx_mul
from qbm import funcapprox as fa

FMT10 = FixedPointFormat(10, 4)
FMT16 = FixedPointFormat(16, 4)


def test_mini_specs_keep_exact_coefficients():
    spec = fa.mini_sin_spec(FMT10)
    assert spec.coeff_exact == ((Fraction(1, 8), Fraction(4)),)
    rad = fa.mini_radial_spec(FMT10)
    assert rad.coeff_exact == ((Fraction(5, 2), Fraction(-5, 2)),)


def test_eval_mini_sin_examples():
    spec = fa.mini_sin_spec(FMT10)
    assert fa.eval_poly(spec, fx_from_real(0.0, FMT10)).value == 0.125
    assert fa.eval_poly(spec, fx_from_real(0.125, FMT10)).value == 0.625


def test_eval_constant_spec():
    spec = fa.build_poly_spec("sin2pi", FMT16, 1, 0, (0.0, 0.25), override_coeffs=[[0.375]])
    for x in (0.0, 0.1, 0.25):
        assert fa.eval_poly(spec, fx_from_real(x, FMT16)).value == 0.375


def test_eval_out_of_domain():
    spec = fa.build_poly_spec("ln", FMT16, 2, 1)
    with pytest.raises(OutOfDomainError):
        fa.eval_poly(spec, fx_from_real(0.25, FMT16))


def test_singular_domain_rejected():
    with pytest.raises(DomainSingularityError):
        fa.build_poly_spec("ln", FMT16, 2, 1, (0.0, 1.0))
    with pytest.raises(DomainSingularityError):
        fa.build_poly_spec("sqrt", FMT16, 2, 1, (-0.5, 1.0))


def test_chebyshev_ln_piece_coefficients():
    # independent fit: line through the Chebyshev nodes of each half-interval
    spec = fa.build_poly_spec("ln", FMT16, 2, 1, (0.5, 1.0))
    for piece in range(2):
        lo = 0.5 + piece * 0.25
        nodes = [
            (lo + 0.125) + 0.125 * math.cos(math.pi * (2 * i + 1) / 4) for i in range(2)
        ]
        slope = (math.log(nodes[0]) - math.log(nodes[1])) / (nodes[0] - nodes[1])
        intercept = math.log(nodes[0]) - slope * nodes[0]
        got = spec.coefficients(piece)
        assert got[0] == math.floor(intercept / FMT16.resolution) * FMT16.resolution
        assert got[1] == math.floor(slope / FMT16.resolution) * FMT16.resolution


def test_horner_matches_fx_chain_bit_exactly():
    # when every coefficient is representable, eval_poly must equal the
    # explicit fx_mul/fx_add composition word for word
    spec = fa.build_poly_spec("sin2pi", FMT16, 32, 1)
    res = FMT16.resolution
    for xv in np.linspace(0.0, 0.25, 57):
        x = fx_from_real(xv, FMT16)
        row = spec.coeff_raw[spec.piece_index(x.value)]
        assert all(abs(c) <= FMT16.max_raw for c in row)
        acc = FxNum(FMT16, row[-1])
        for c in reversed(row[:-1]):
            acc = fx_add(fx_mul(acc, x), FxNum(FMT16, c))
        assert fa.eval_poly(spec, x).raw == acc.raw
    assert res == spec.format.resolution


@pytest.mark.parametrize("degree", [0, 1, 2, 3, 4])
def test_eval_poly_multiplication_count(degree):
    # Horner with d+1 coefficients costs exactly d multiply-truncates: a
    # counted fx_mul chain of that length reproduces eval_poly bit-exactly
    fmt = FixedPointFormat(16, 10)  # wide integer part keeps raw coeffs in range
    spec = fa.build_poly_spec("sin2pi", fmt, 4, degree, (0.0, 0.25))
    for xv in (0.01, 0.11, 0.2, 0.24):
        x = fx_from_real(xv, fmt)
        row = spec.coeff_raw[spec.piece_index(x.value)]
        assert len(row) == degree + 1
        mults = 0
        acc = FxNum(fmt, row[-1])
        for c in reversed(row[:-1]):
            acc = fx_add(fx_mul(acc, x), FxNum(fmt, c))
            mults += 1
        assert mults == degree
        assert fa.eval_poly(spec, x).raw == acc.raw


def test_sin_fold_examples():
    spec = fa.build_poly_spec("sin2pi", FMT16, 32, 1)
    x = fx_from_real(0.25, FMT16)
    assert abs(fa.sin2pi_fx(x, spec).value - 1.0) < 2e-3
    # linear mini spec at 1/8 evaluates the quarter-domain poly directly
    mini = fa.mini_sin_spec(FMT10)
    assert fa.sin2pi_fx(fx_from_real(0.125, FMT10), mini).value == 0.625


def test_sin_odd_symmetry_bit_exact():
    spec = fa.build_poly_spec("sin2pi", FMT10, 8, 1)
    one = 1 << FMT10.frac_bits
    half = one >> 1
    for raw in range(one + 1):
        if raw == half:
            # x = 1/2 is its own reflection; exact oddness there would need
            # the quarter-spec to vanish at 0, which quantized fits do not
            continue
        s1 = fa.sin2pi_fx(FxNum(FMT10, raw), spec)
        s2 = fa.sin2pi_fx(FxNum(FMT10, one - raw), spec)
        assert s1.raw == -s2.raw


def test_cos_via_quarter_shift():
    spec = fa.build_poly_spec("sin2pi", FMT16, 32, 1)
    for xv in (0.0, 0.1, 0.25, 0.37, 0.5, 0.75, 0.99):
        x = fx_from_real(xv, FMT16)
        got = fa.cos2pi_fx(x, spec).value
        assert abs(got - math.cos(2 * math.pi * x.value)) < 3e-3


def test_pythagorean_identity_bound():
    spec = fa.build_poly_spec("sin2pi", FMT16, 32, 1)
    bound = 4.0 * (fa.approx_error_report(spec, 2000) + 8.0 * FMT16.resolution)
    worst = 0.0
    for xv in np.linspace(0.0, 1.0, 10_000):
        x = fx_from_real(xv, FMT16)
        s = fa.sin2pi_fx(x, spec).value
        c = fa.cos2pi_fx(x, spec).value
        worst = max(worst, abs(s * s + c * c - 1.0))
    assert worst <= bound


def test_ln_examples():
    spec = fa.build_poly_spec("ln", FMT16, 32, 1)
    wide = FMT16.widened(3)
    ln2c = fx_from_real(math.log(2.0), wide)
    tol = fa.approx_error_report(spec, 2000) + 4 * FMT16.resolution
    assert abs(fa.ln_fx(fx_from_real(1.0, FMT16), spec, ln2c).value) <= tol
    assert abs(fa.ln_fx(fx_from_real(0.5, FMT16), spec, ln2c).value + math.log(2.0)) <= tol
    got = fa.ln_fx(fx_from_real(0.75, FMT16), spec, ln2c).value
    assert abs(got - math.log(0.75)) <= tol
    with pytest.raises(NonPositiveInputError):
        fa.ln_fx(fx_from_real(0.0, FMT16), spec, ln2c)


def test_ln_range_reduction_consistency():
    spec = fa.build_poly_spec("ln", FMT16, 32, 1)
    wide = FMT16.widened(3)
    ln2c = fx_from_real(math.log(2.0), wide)
    poly_err_at_1 = abs(fa.eval_poly(spec, fx_from_real(1.0, FMT16)).value)
    for j in range(0, 9):
        x = fx_from_real(2.0**-j, FMT16)
        got = fa.ln_fx(x, spec, ln2c).value
        assert abs(got - (-j) * ln2c.value) <= poly_err_at_1 + FMT16.resolution


def test_sqrt_examples():
    spec = fa.build_poly_spec("sqrt", FMT16, 32, 1)
    wide = FMT16.widened(3)
    assert fa.sqrt_fx(fx_from_real(0.0, FMT16), spec).value == 0.0
    tol = fa.approx_error_report(spec, 2000) + 8 * FMT16.resolution
    got = fa.sqrt_fx(fx_from_real(4.0, wide), spec)
    assert abs(got.value - 2.0) <= 4 * tol
    got = fa.sqrt_fx(fx_from_real(0.5, FMT16), spec)
    assert abs(got.value - math.sqrt(0.5)) <= tol


def test_sqrt_fold_lands_in_quarter_one():
    # even-exponent reduction: argument times 4^-j lands in [1/4, 1)
    for w in (0.001, 0.2, 0.3, 0.9999, 1.0, 2.5, 4.0, 7.5, 20.0, 55.0):
        t = math.floor(math.log2(w))
        e = t + 2 if t % 2 == 0 else t + 1
        assert e % 2 == 0
        assert 0.25 <= w * 2.0**-e < 1.0


def test_approx_error_report_cases():
    const = fa.build_poly_spec("sin2pi", FMT16, 1, 0, (0.0, 0.25), override_coeffs=[[0.0]])
    # constant 0 against sin: worst error is sin(pi/2) = 1 at the domain edge
    assert abs(fa.approx_error_report(const, 101) - 1.0) < 1e-12
    mini = fa.mini_sin_spec(FMT16)
    assert abs(fa.approx_error_report(mini, 1001) - 0.125) < 2e-3
    errs = [
        fa.approx_error_report(fa.build_poly_spec("sin2pi", FMT16, m, 1), 2000)
        for m in (1, 2, 4, 8, 16)
    ]
    assert all(errs[i + 1] < errs[i] for i in range(len(errs) - 1))


def test_spec_serialization_roundtrip():
    for spec in (
        fa.build_poly_spec("sin2pi", FMT16, 32, 1),
        fa.mini_radial_spec(FMT10),
    ):
        again = fa.PiecewisePolySpec.from_json(spec.to_json())
        assert again == spec
