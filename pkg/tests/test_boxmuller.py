import hashlib
import json
import math

import numpy as np
import pytest

from qbm import boxmuller as bm
from qbm.errors import (
    DimensionMismatchError,
    NonPositiveInputError,
    NotPositiveDefiniteError,
)
from qbm.fixedpoint import FixedPointFormat


def test_transform_point_examples():
    assert bm.transform_point(1.0, 0.37) == (0.0, 0.0)
    z1, z2 = bm.transform_point(math.exp(-2.0), 0.25)
    assert abs(z1 - 2.0) < 1e-12 and abs(z2) < 1e-12
    z1, z2 = bm.transform_point(math.exp(-2.0), 0.0)
    assert abs(z1) < 1e-12 and abs(z2 - 2.0) < 1e-12
    with pytest.raises(NonPositiveInputError):
        bm.transform_point(0.0, 0.5)


def test_grid_conventions():
    mid = bm.GridConfig(2, 0.0, 1.0, convention="midpoint")
    assert np.allclose(mid.u_values(), [0.125, 0.375, 0.625, 0.875])
    end = bm.GridConfig(2, 0.0, 1.0, convention="endpoint")
    assert np.allclose(end.u_values(), [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0])
    with pytest.raises(ValueError):
        bm.GridConfig(3, 0.5, 0.25)


def test_generate_length_is_grid_squared():
    for m in (1, 3, 5):
        cfg = bm.GridConfig(m, 0.01, 0.99)
        assert len(bm.generate_samples(cfg, "exact")) == 4**m


def test_generate_matches_pointwise_oracle():
    cfg = bm.GridConfig(5, 1.0 / 32.0, 31.0 / 32.0, convention="endpoint")
    ss = bm.generate_samples(cfg, "exact")
    n = cfg.n_per_axis
    u, v = cfg.u_values(), cfg.v_values()
    for idx in range(0, len(ss), 37):
        j, k = divmod(idx, n)
        z1, z2 = bm.transform_point(u[j], v[k])
        assert ss.z1[idx] == pytest.approx(z1, abs=1e-12)
        assert ss.z2[idx] == pytest.approx(z2, abs=1e-12)


def test_narrow_band_radii_near_two():
    cfg = bm.GridConfig(1, math.exp(-2.0) * 0.999, math.exp(-2.0) * 1.001)
    ss = bm.generate_samples(cfg, "exact")
    radii = np.hypot(ss.z1, ss.z2)
    assert np.allclose(radii, 2.0, atol=5e-3)


def test_radius_identity_exact_mode():
    cfg = bm.GridConfig(5, 1e-12, 1.0)
    ss = bm.generate_samples(cfg, "exact")
    assert np.max(np.abs(ss.z1**2 + ss.z2**2 + 2.0 * np.log(ss.u))) < 1e-10


def test_midpoint_v_grid_mean_is_zero():
    cfg = bm.GridConfig(6, 1e-10, 1.0, v_min=0.0, v_max=1.0, convention="midpoint")
    ss = bm.generate_samples(cfg, "exact")
    assert abs(float(np.mean(ss.z1))) < 1e-10
    assert abs(float(np.mean(ss.z2))) < 1e-10


def test_generation_is_pure(tmp_path):
    cfg = bm.GridConfig(5, 1e-6, 1.0 - 1e-6)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    bm.generate_samples(cfg, "exact").to_csv(p1)
    bm.generate_samples(cfg, "exact").to_csv(p2)
    digest = lambda p: hashlib.sha256(p.read_bytes()).hexdigest()
    assert digest(p1) == digest(p2)


def test_correlate_identity_and_degenerate():
    cfg = bm.GridConfig(4, 0.01, 0.99)
    ss = bm.generate_samples(cfg, "exact")
    same = bm.correlate(ss, bm.CorrelationSpec(0.0))
    assert np.array_equal(same.z1, ss.z1) and np.array_equal(same.z2, ss.z2)
    merged = bm.correlate(ss, bm.CorrelationSpec(1.0))
    assert np.array_equal(merged.z2, merged.z1)


def test_correlate_pearson_tracks_rho():
    cfg = bm.GridConfig(7, 1e-6, 1.0 - 1e-6)
    ss = bm.generate_samples(cfg, "exact")
    cs = bm.correlate(ss, bm.CorrelationSpec(0.6))
    r = float(np.corrcoef(cs.z1, cs.z2)[0, 1])
    assert abs(r - 0.6) < 0.05


def test_cholesky_examples():
    assert np.allclose(bm.cholesky(np.eye(3)), np.eye(3))
    assert np.allclose(bm.cholesky(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    L = bm.cholesky(np.array([[1.0, 0.6], [0.6, 1.0]]))
    assert np.allclose(L, [[1.0, 0.0], [0.6, 0.8]])
    cov = np.array([[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 0.9]])
    L = bm.cholesky(cov)
    assert np.linalg.norm(L @ L.T - cov) / np.linalg.norm(cov) < 1e-12
    with pytest.raises(NotPositiveDefiniteError):
        bm.cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(NotPositiveDefiniteError):
        bm.cholesky(np.array([[1.0, 0.5], [0.2, 1.0]]))


def test_multivariate_identity_and_affine():
    cfg = bm.GridConfig(4, 0.01, 0.99)
    ss = bm.generate_samples(cfg, "exact")
    ident = bm.MultivariateSpec(2, (0.0, 0.0), ((1.0, 0.0), (0.0, 1.0)))
    pts = bm.multivariate([ss], ident)
    assert np.array_equal(pts[:, 0], ss.z1) and np.array_equal(pts[:, 1], ss.z2)
    one = bm.MultivariateSpec(1, (2.0,), ((3.0,),))
    pts = bm.multivariate([ss], one)
    assert np.allclose(pts[:, 0], 2.0 + 3.0 * ss.z1)
    with pytest.raises(DimensionMismatchError):
        bm.multivariate([ss, ss], one)


def test_multivariate_variances():
    a = bm.generate_samples(bm.GridConfig(7, 1e-6, 1.0 - 1e-6), "exact")
    b = bm.generate_samples(bm.GridConfig(7, 1e-7, 1.0 - 1e-7), "exact")
    L = bm.cholesky(np.diag([1.0, 4.0, 9.0]))
    spec = bm.MultivariateSpec(3, (0.0, 0.0, 0.0), tuple(map(tuple, L)))
    pts = bm.multivariate([a, b], spec)
    assert np.allclose(pts.var(axis=0), [1.0, 4.0, 9.0], rtol=0.10)


def test_jacobian_examples():
    analytic, _ = bm.jacobian_check(0.5, 0.3, 0.0)
    assert analytic == pytest.approx(4.0 * math.pi, rel=1e-12)
    rng = np.random.default_rng(11)
    for _ in range(100):
        u = rng.uniform(0.05, 0.95)
        v = rng.uniform(0.05, 0.95)
        rho = rng.uniform(-0.9, 0.9)
        ana, num = bm.jacobian_check(u, v, rho)
        assert abs(ana - num) / ana < 1e-5
    ana, _ = bm.jacobian_check(0.5, 0.5, 1.0)
    assert ana == 0.0


def test_change_of_variables_cancellation():
    rng = np.random.default_rng(23)
    for _ in range(100):
        u = rng.uniform(0.05, 0.95)
        v = rng.uniform(0.05, 0.95)
        rho = rng.uniform(-0.9, 0.9)
        z1, z2 = bm.transform_point(u, v)
        x1 = z1
        x2 = rho * z1 + math.sqrt(1.0 - rho * rho) * z2
        analytic = 2.0 * math.pi * math.sqrt(1.0 - rho * rho) / u
        assert bm.correlated_pdf(x1, x2, rho) * analytic == pytest.approx(1.0, abs=1e-8)


def test_fixedpoint_mode_matches_scalar_pipeline():
    fmt = FixedPointFormat(12, 4)
    pipe = bm.standard_pipeline(fmt, pieces=16, degree=1)
    cfg = bm.GridConfig(3, 1.0 / 16.0, 15.0 / 16.0)
    ss = bm.generate_samples(cfg, pipe)
    # recompute one row with the scalar operations
    from qbm.fixedpoint import fx_from_real, fx_mul
    from qbm import funcapprox as fa

    n = cfg.n_per_axis
    u = fx_from_real(float(cfg.u_values()[2]), fmt)
    r = bm._radial_fx(pipe, u)
    for k in range(n):
        v = fx_from_real(float(cfg.v_values()[k]), fmt)
        s = fa.sin2pi_fx(v, pipe.sin_spec)
        c = fa.cos2pi_fx(v, pipe.sin_spec)
        assert ss.z1_raw[2 * n + k] == fx_mul(r, s).raw
        assert ss.z2_raw[2 * n + k] == fx_mul(r, c).raw


def test_fixedpoint_radius_identity_loose():
    fmt = FixedPointFormat(16, 4)
    pipe = bm.standard_pipeline(fmt)
    cfg = bm.GridConfig(5, fmt.resolution, 1.0 - fmt.resolution)
    ss = bm.generate_samples(cfg, pipe)
    resid = np.abs(ss.z1**2 + ss.z2**2 + 2.0 * np.log(ss.u))
    assert float(np.max(resid)) < 0.15


def test_fixedpoint_rejects_grid_quantizing_to_zero():
    fmt = FixedPointFormat(10, 4)
    pipe = bm.standard_pipeline(fmt)
    cfg = bm.GridConfig(5, 1e-4, 0.9, convention="endpoint")  # u_min << resolution
    with pytest.raises(NonPositiveInputError):
        bm.generate_samples(cfg, pipe)


def test_mini_pipeline_statistics():
    ss = bm.generate_samples(bm.mini_grid(5), bm.mini_pipeline(5, 3))
    assert len(ss) == 1024
    pooled = ss.pooled()
    assert abs(float(pooled.mean())) <= 0.2
    assert 0.7 <= float(pooled.std()) <= 1.3
    # outputs sit on the 2^-2 grid of the (5, 3) format
    assert np.all(ss.z1 * 4 == np.round(ss.z1 * 4))


def test_mini_pipeline_is_integer_exact_before_store():
    # r and s are dyadic: r*s floored to the output grid must match a direct
    # rational recomputation at a few points
    from fractions import Fraction

    ss = bm.generate_samples(bm.mini_grid(5), bm.mini_pipeline(5, 3))
    for j, k in ((0, 0), (3, 7), (17, 25), (31, 31)):
        u = Fraction(j, 32)
        v = Fraction(k, 32)
        r = Fraction(5, 2) * (1 - u)
        import qbm.funcapprox as fa

        sign, folded = fa.fold_quarter_exact(v)
        s = sign * (Fraction(1, 8) + 4 * folded)
        want = math.floor(r * s * 4) / 4.0
        assert ss.z1[j * 32 + k] == want


def test_csv_and_json_roundtrip(tmp_path):
    cfg = bm.GridConfig(3, 0.01, 0.99)
    ss = bm.generate_samples(cfg, "exact")
    csv_path = tmp_path / "s.csv"
    json_path = tmp_path / "s.json"
    ss.to_csv(csv_path)
    ss.to_json(json_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "j,k,u,v,z1,z2"
    assert len(lines) == 1 + len(ss)
    doc = json.loads(json_path.read_text())
    assert doc["config"]["grid_qubits"] == 3
    assert np.allclose(doc["z1"], ss.z1)
    # fixed-point export carries the raw words
    fmt = FixedPointFormat(10, 4)
    fss = bm.generate_samples(
        bm.GridConfig(3, 1.0 / 16.0, 15.0 / 16.0), bm.standard_pipeline(fmt)
    )
    fcsv = tmp_path / "f.csv"
    fss.to_csv(fcsv)
    assert fcsv.read_text().splitlines()[0] == "j,k,u,v,z1,z2,z1_raw,z2_raw"
