import math

import numpy as np
import pytest

from qbm.errors import BadAmplitudeError
from qbm.qae import QAEConfig, qae_error_bound, qae_estimate, qae_outcome_distribution


def test_distribution_point_masses():
    d = qae_outcome_distribution(0.0, 16)
    assert d[0] == pytest.approx(1.0, abs=1e-12)
    d = qae_outcome_distribution(1.0, 16)
    assert d[8] == pytest.approx(1.0, abs=1e-12)


def test_distribution_half_on_grid():
    d = qae_outcome_distribution(0.5, 4)
    assert d[1] == pytest.approx(0.5, abs=1e-12)
    assert d[3] == pytest.approx(0.5, abs=1e-12)
    assert d[0] == pytest.approx(0.0, abs=1e-12)
    assert d[2] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("m", [2, 8, 64, 512])
@pytest.mark.parametrize("a", [0.0, 0.013, 0.25, 0.5, 0.777, 1.0])
def test_distribution_normalized(a, m):
    assert qae_outcome_distribution(a, m).sum() == pytest.approx(1.0, abs=1e-12)


def test_distribution_rejects_bad_inputs():
    with pytest.raises(BadAmplitudeError):
        qae_outcome_distribution(1.5, 8)
    with pytest.raises(ValueError):
        qae_outcome_distribution(0.5, 12)


def test_estimate_zero_amplitude_exact():
    for seed in range(5):
        assert qae_estimate(0.0, QAEConfig(64, 15, rng_seed=seed)) == 0.0


def test_estimate_grid_exact_phase():
    a = math.sin(math.pi / 8.0) ** 2
    for seed in range(10):
        assert qae_estimate(a, QAEConfig(8, 15, rng_seed=seed)) == a


def test_estimate_reproducible():
    cfg = QAEConfig(256, 15, rng_seed=42)
    assert qae_estimate(0.3, cfg) == qae_estimate(0.3, cfg)


def test_grover_power_rounds_up_to_pow2():
    assert QAEConfig(1000).phase_bins == 1024
    assert QAEConfig(1024).phase_bins == 1024
    assert QAEConfig(1).phase_bins == 2


def test_error_bound_examples():
    assert qae_error_bound(0.0, 10, 1.0) == pytest.approx(0.01)
    assert qae_error_bound(1.0, 10, 1.0) == pytest.approx(0.11)
    bounds = [qae_error_bound(0.4, t, 2.0) for t in (1, 2, 4, 8, 16)]
    assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))


def test_contract_calibration_sample():
    # the full 200-trial sweep runs in the acceptance module; spot-check here
    for a in (0.1, 0.7):
        bound = qae_error_bound(a, 256, 5.0)
        hits = sum(
            abs(qae_estimate(a, QAEConfig(256, 15, rng_seed=s)) - a) <= bound
            for s in range(50)
        )
        assert hits >= 49


def test_mode_within_half_bin():
    # the most probable outcome's estimate sits within half a phase bin of
    # the true amplitude: |sin^2(pi y*/M) - a| <= sin(pi / 2M).  (The
    # estimate-grid form sin^2(pi/M) is provably too tight mid-range.)
    for m in (8, 16, 32, 64, 128, 256, 512, 1024):
        cap = math.sin(math.pi / (2 * m))
        for k in range(1, 100):
            a = 0.01 * k
            y = int(np.argmax(qae_outcome_distribution(a, m)))
            assert abs(math.sin(math.pi * y / m) ** 2 - a) <= cap + 1e-12


def test_rms_error_scaling_envelope():
    # median-of-15 error tracks the sqrt(a)/t envelope; the pointwise decay
    # fit is limited by the dyadic phase-grid staircase at fixed a
    a = 0.3
    ms, rms = [], []
    for e in range(4, 13):
        m = 2**e
        errs = [
            qae_estimate(a, QAEConfig(m, 15, rng_seed=91_000 + 1000 * e + s)) - a
            for s in range(500)
        ]
        ms.append(m)
        rms.append(float(np.sqrt(np.mean(np.square(errs)))))
    for m, r in zip(ms, rms):
        assert r <= qae_error_bound(a, m, 5.0)
    slope = float(np.polyfit(np.log(ms), np.log(rms), 1)[0])
    assert slope <= -0.8


def test_median_failure_rate_halves_per_two_reps():
    a, m = 0.41, 64
    bound = qae_error_bound(a, m, 5.0)
    rates = []
    for reps in (1, 3, 5):
        trials = 40_000 if reps == 5 else 8000
        fails = sum(
            abs(qae_estimate(a, QAEConfig(m, reps, rng_seed=7_000_000 + 101 * reps + s)) - a)
            > bound
            for s in range(trials)
        )
        rates.append(fails / trials)
    assert rates[0] > 0.01  # the instance is non-trivial
    assert rates[1] <= rates[0] / 2.0
    assert rates[2] <= rates[1] / 2.0
