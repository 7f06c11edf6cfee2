"""Drivers for the three expectation estimators.

algorithm1 handles payoffs bounded in [0, 1]: truncate U to a window that
costs at most c1*eps of expectation mass, average the payoff over the grid
multiset, and feed that post-selection probability to the amplitude
estimator.  algorithm2 telescopes a nonnegative payoff with bounded second
moment into clamped dyadic bands, each estimated by algorithm1.
algorithm3 recenters a bounded-variance payoff with a one-point probe and
runs algorithm2 on the positive and negative residual parts.

Reported budgets are sound upper bounds: the truncation entry includes the
small normalization mismatch between the grid average (1/N^2) sum and the
truncated integral (the grid rectangle has area (u_max-u_min)(v_max-v_min)
< 1), which the asymptotic analysis absorbs into constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .boxmuller import FixedPointPipeline, GridConfig, generate_samples
from .errors import EpsilonRangeError, EpsilonTooLargeError, PayoffRangeError
from .qae import QAEConfig, qae_error_bound, qae_estimate

__all__ = [
    "Payoff",
    "TruncationParams",
    "EstimateResult",
    "Algo1Config",
    "Case2Config",
    "Case3Config",
    "select_truncation",
    "trunc_budget",
    "disc_bound",
    "algorithm1",
    "algorithm2",
    "algorithm3",
    "recipe_algo1_config",
    "builtin_payoff",
    "BUILTIN_PAYOFFS",
    "clear_mean_cache",
]

QAE_BOUND_CONSTANT = 5.0  # empirically certified in the test suite


@dataclass(frozen=True)
class Payoff:
    """A payoff with caller-certified derivative bounds.

    d1_bound bounds |dθ/dz1| + |dθ/dz2|; d2_bound bounds the sum of the
    absolute second partials.  level_d1/level_d2, when set, certify the
    same quantities for every clamped-to-[x,y)-and-rescaled band of the
    payoff (usable when the derivatives are bounded relative to the payoff
    itself, e.g. exponentials).  eval must accept numpy arrays.
    """

    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    d1_bound: float
    d2_bound: float
    name: str = "payoff"
    level_d1: float | None = None
    level_d2: float | None = None


@dataclass(frozen=True)
class TruncationParams:
    u_min: float
    u_max: float
    l: float
    L: float
    c1: float


@dataclass(frozen=True)
class EstimateResult:
    mu_hat: float
    budget: dict
    grid_qubits: int
    grover_power: int
    true_grid_mean: float
    levels: list[dict] | None = None

    @property
    def total_budget(self) -> float:
        return sum(self.budget.values())

    def to_dict(self) -> dict:
        doc = {
            "mu_hat": self.mu_hat,
            "budget": dict(self.budget),
            "grid_qubits": self.grid_qubits,
            "grover_power": self.grover_power,
            "true_grid_mean": self.true_grid_mean,
        }
        if self.levels is not None:
            doc["levels"] = self.levels
        return doc


@dataclass(frozen=True)
class Algo1Config:
    grid_qubits: int
    c1: float
    epsilon: float
    qae: QAEConfig
    mode: str | FixedPointPipeline = "exact"
    convention: str = "midpoint"
    umax_pi_variant: bool = False
    payoff_token: str | None = None


@dataclass(frozen=True)
class Case2Config:
    B: float
    epsilon: float
    delta: float = 0.1
    D: float = 2.0
    D_tilde: float = 2.0
    max_grid_qubits: int = 13
    rng_seed: int = 0
    mode: str | FixedPointPipeline = "exact"
    payoff_token: str | None = None


@dataclass(frozen=True)
class Case3Config:
    sigma: float
    epsilon: float
    rng_seed: int = 0
    probe_grid_qubits: int = 9
    max_grid_qubits: int = 9
    mode: str | FixedPointPipeline = "exact"
    payoff_token: str | None = None


def select_truncation(c1: float, epsilon: float, pi_variant: bool = False) -> TruncationParams:
    """Truncation window: u_min = c1 eps / 2, u_max = exp(-c1 eps / 2).

    The pi_variant flag switches u_max to exp(-c1 pi eps / 2); only the
    default makes l^2/2 + exp(-L^2/2) collapse to exactly c1 * eps.
    """
    if c1 <= 0 or epsilon <= 0:
        raise ValueError("c1 and epsilon must be positive")
    u_min = 0.5 * c1 * epsilon
    u_max = math.exp(-0.5 * c1 * epsilon * (math.pi if pi_variant else 1.0))
    if u_min >= u_max:
        raise EpsilonTooLargeError(f"u_min {u_min} >= u_max {u_max}")
    return TruncationParams(
        u_min=u_min,
        u_max=u_max,
        l=math.sqrt(-2.0 * math.log(u_max)),
        L=math.sqrt(-2.0 * math.log(u_min)),
        c1=c1,
    )


def trunc_budget(params: TruncationParams, v_width: float = 1.0) -> float:
    """Mass bound l^2/2 + e^(-L^2/2) plus the grid-normalization mismatch."""
    area = (params.u_max - params.u_min) * v_width
    return 0.5 * params.l**2 + math.exp(-0.5 * params.L**2) + (1.0 - area) / area


def _second_derivative_u(payoff: Payoff, u: float) -> float:
    x = -2.0 * math.log(u)
    return payoff.d1_bound / (u * u * math.sqrt(x)) * (1.0 / x + 1.0) + payoff.d2_bound / (
        u * u * x
    )


def disc_bound(
    payoff: Payoff,
    params: TruncationParams,
    n_per_axis: int,
    v_min: float = 0.0,
    v_max: float = 1.0,
) -> float:
    """Midpoint Riemann bound on |truncated integral - grid average|.

    M_u is the chain-rule second-derivative bound evaluated at both window
    endpoints (it is largest at an edge), M_v its angular counterpart at
    u_min; the rectangle version of the midpoint lemma then gives
    (M_u w_u^2 + M_v w_v^2) / (24 N^2) after normalizing by the window
    area.
    """
    if n_per_axis < 2:
        raise ValueError("need at least 2 points per axis")
    m_u = max(
        _second_derivative_u(payoff, params.u_min),
        _second_derivative_u(payoff, params.u_max),
    )
    x0 = -2.0 * math.log(params.u_min)
    four_pi2 = (2.0 * math.pi) ** 2
    m_v = four_pi2 * (x0 * payoff.d2_bound + math.sqrt(x0) * payoff.d1_bound)
    w_u = params.u_max - params.u_min
    w_v = v_max - v_min
    return (m_u * w_u * w_u + m_v * w_v * w_v) / (24.0 * n_per_axis * n_per_axis)


# ---------------------------------------------------------------------------
# grid means, chunked and memoized

_MEAN_CACHE: dict = {}


def clear_mean_cache() -> None:
    _MEAN_CACHE.clear()


def _mode_key(mode: str | FixedPointPipeline):
    if isinstance(mode, str):
        return mode
    return tuple(sorted(mode.describe().items()))


def _grid_key(grid: GridConfig, mode) -> tuple:
    return (
        grid.grid_qubits,
        grid.u_min,
        grid.u_max,
        grid.v_min,
        grid.v_max,
        grid.convention,
        _mode_key(mode),
    )


def grid_payoff_stats(
    payoff_fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    grid: GridConfig,
    mode: str | FixedPointPipeline = "exact",
    token: str | None = None,
) -> tuple[float, float, float]:
    """(mean, min, max) of the payoff over the grid multiset."""
    key = (token, _grid_key(grid, mode)) if token is not None else None
    if key is not None and key in _MEAN_CACHE:
        return _MEAN_CACHE[key]

    n = grid.n_per_axis
    if isinstance(mode, FixedPointPipeline):
        ss = generate_samples(grid, mode)
        vals = payoff_fn(ss.z1, ss.z2)
        out = (float(np.mean(vals)), float(np.min(vals)), float(np.max(vals)))
    else:
        u = grid.u_values()
        if np.any(u <= 0.0):
            raise ValueError("grid touches u = 0")
        r = np.sqrt(-2.0 * np.log(u))
        v = grid.v_values()
        s = np.sin(2.0 * np.pi * v)
        c = np.cos(2.0 * np.pi * v)
        total = 0.0
        vmin = math.inf
        vmax = -math.inf
        block = max(1, (1 << 22) // n)
        for lo in range(0, n, block):
            rr = r[lo : lo + block, None]
            vals = payoff_fn(rr * s[None, :], rr * c[None, :])
            total += float(np.sum(vals))
            vmin = min(vmin, float(np.min(vals)))
            vmax = max(vmax, float(np.max(vals)))
        out = (total / (n * n), vmin, vmax)

    if key is not None:
        _MEAN_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# algorithm 1: payoffs in [0, 1]


def algorithm1(payoff: Payoff, cfg: Algo1Config) -> EstimateResult:
    params = select_truncation(cfg.c1, cfg.epsilon, cfg.umax_pi_variant)
    grid = GridConfig(
        cfg.grid_qubits, params.u_min, params.u_max, convention=cfg.convention
    )
    a, lo, hi = grid_payoff_stats(payoff.eval, grid, cfg.mode, cfg.payoff_token)
    if lo < -1e-12 or hi > 1.0 + 1e-12:
        raise PayoffRangeError(f"payoff range [{lo}, {hi}] leaves [0, 1]")
    a = min(max(a, 0.0), 1.0)
    a_hat = qae_estimate(a, cfg.qae)
    budget = {
        "eps_trunc": trunc_budget(params),
        "eps_disc": disc_bound(payoff, params, grid.n_per_axis),
        "eps_qae": qae_error_bound(a_hat, cfg.qae.grover_power, QAE_BOUND_CONSTANT),
    }
    return EstimateResult(
        mu_hat=a_hat,
        budget=budget,
        grid_qubits=cfg.grid_qubits,
        grover_power=cfg.qae.grover_power,
        true_grid_mean=a,
    )


def recipe_algo1_config(
    epsilon: float,
    mu_hint: float = 1.0,
    c1: float = 1.0 / 3.0,
    rng_seed: int = 0,
    repetitions: int = 15,
    max_grid_qubits: int = 13,
    mode: str | FixedPointPipeline = "exact",
    payoff_token: str | None = None,
) -> Algo1Config:
    """Scaling recipe N ~ eps^-3/2, t ~ sqrt(mu)/eps behind one accuracy knob."""
    grid_qubits = min(max_grid_qubits, math.ceil(1.5 * math.log2(1.0 / epsilon)) + 1)
    grover = math.ceil(3.0 * QAE_BOUND_CONSTANT * max(math.sqrt(mu_hint), 0.1) / epsilon)
    return Algo1Config(
        grid_qubits=grid_qubits,
        c1=c1,
        epsilon=epsilon,
        qae=QAEConfig(grover_power=grover, repetitions=repetitions, rng_seed=rng_seed),
        mode=mode,
        payoff_token=payoff_token,
    )


# ---------------------------------------------------------------------------
# algorithm 2: nonnegative payoffs with E[theta^2] <= B^2


def _band_fn(payoff_fn, lo: float, hi: float, scale: float):
    def fn(z1, z2):
        th = payoff_fn(z1, z2)
        return np.where((th >= lo) & (th < hi), th, 0.0) / scale

    return fn


def _reps_for(delta: float) -> int:
    return max(3, 2 * math.ceil(2.5 * math.log(1.0 / delta)) + 1)


def algorithm2(payoff: Payoff, cfg: Case2Config) -> EstimateResult:
    """Telescoped estimate mu0 + sum 2^l mu_l over clamped dyadic bands."""
    if cfg.epsilon <= 0:
        raise EpsilonRangeError("epsilon must be positive")
    b = cfg.B
    eps_tilde = cfg.epsilon / (3.0 * (b + 1.0) ** 2)
    k = max(1, math.ceil(math.log2(1.0 / eps_tilde)))
    t0 = math.ceil(cfg.D_tilde * math.sqrt(math.log2(1.0 / eps_tilde)) / eps_tilde)
    c1_level = 1.0 / (3.0 * (k + 1))
    relative = payoff.level_d1 is not None

    seeds = np.random.SeedSequence(cfg.rng_seed).spawn(k + 1)
    mu_hat = 0.0
    grid_mean = 0.0
    budget = {"eps_trunc": 0.0, "eps_disc": 0.0, "eps_qae": 0.0}
    levels = []
    max_m = 0
    for level in range(k + 1):
        eps_l = cfg.epsilon / (1 << level)
        n_l = math.ceil(cfg.D * math.sqrt(k + 1) / eps_l**1.5)
        m_l = min(cfg.max_grid_qubits, max(2, math.ceil(math.log2(n_l))))
        max_m = max(max_m, m_l)
        weight = 1 << level if level else 1
        if level == 0:
            band = _band_fn(payoff.eval, 0.0, 1.0, 1.0)
            delta_l = cfg.delta / 2.0
        else:
            band = _band_fn(payoff.eval, float(1 << (level - 1)), float(1 << level), float(1 << level))
            delta_l = cfg.delta / (2.0 * k)
        if relative:
            d1_l, d2_l = payoff.level_d1, payoff.level_d2
        else:
            d1_l, d2_l = payoff.d1_bound / weight, payoff.d2_bound / weight
        level_payoff = Payoff(band, d1_l, d2_l, name=f"{payoff.name}[band {level}]")
        token = f"{cfg.payoff_token}|lvl{level}" if cfg.payoff_token else None
        sub = algorithm1(
            level_payoff,
            Algo1Config(
                grid_qubits=m_l,
                c1=c1_level,
                epsilon=eps_l,
                qae=QAEConfig(t0, _reps_for(delta_l), delta_l, int(seeds[level].generate_state(1)[0])),
                mode=cfg.mode,
                payoff_token=token,
            ),
        )
        mu_hat += weight * sub.mu_hat
        grid_mean += weight * sub.true_grid_mean
        for key in budget:
            budget[key] += weight * sub.budget[key]
        levels.append(
            {
                "level": level,
                "epsilon": eps_l,
                "grid_qubits": m_l,
                "mu_hat": sub.mu_hat,
                "grid_mean": sub.true_grid_mean,
            }
        )
    budget["eps_qae"] += b * b / (1 << k)  # mass above the top band
    return EstimateResult(
        mu_hat=mu_hat,
        budget=budget,
        grid_qubits=max_m,
        grover_power=t0,
        true_grid_mean=grid_mean,
        levels=levels,
    )


# ---------------------------------------------------------------------------
# algorithm 3: Var[theta] <= sigma^2


def algorithm3(payoff: Payoff, cfg: Case3Config) -> EstimateResult:
    """Recenter by a one-point probe, then estimate the split residual."""
    sigma = cfg.sigma
    if not 0.0 < cfg.epsilon < 4.0 * sigma:
        raise EpsilonRangeError("need 0 < epsilon < 4 sigma")
    rng = np.random.default_rng(cfg.rng_seed)

    probe_trunc = select_truncation(1.0 / 3.0, cfg.epsilon / (8.0 * sigma))
    probe_grid = GridConfig(cfg.probe_grid_qubits, probe_trunc.u_min, probe_trunc.u_max)
    ss = generate_samples(probe_grid, cfg.mode)
    idx = int(rng.integers(len(ss)))
    mu_prime = float(payoff.eval(np.array([ss.z1[idx]]), np.array([ss.z2[idx]]))[0]) / sigma

    base = payoff.eval

    def minus_part(z1, z2):
        resid = base(z1, z2) / sigma - mu_prime
        return np.maximum(0.0, -resid) / 4.0

    def plus_part(z1, z2):
        resid = base(z1, z2) / sigma - mu_prime
        return np.maximum(0.0, resid) / 4.0

    eps_inner = cfg.epsilon / (8.0 * sigma)
    token = cfg.payoff_token
    sub_cfgs = []
    for tag, fn, seed_off in (("minus", minus_part, 1), ("plus", plus_part, 2)):
        inner = Payoff(
            fn,
            payoff.d1_bound / (4.0 * sigma),
            payoff.d2_bound / (4.0 * sigma),
            name=f"{payoff.name}[{tag}]",
            level_d1=payoff.d1_bound / (4.0 * sigma),
            level_d2=payoff.d2_bound / (4.0 * sigma),
        )
        sub_cfgs.append(
            (
                inner,
                Case2Config(
                    B=1.0,
                    epsilon=eps_inner,
                    delta=1.0 / 9.0,
                    D=2.0,
                    D_tilde=2.0,
                    max_grid_qubits=cfg.max_grid_qubits,
                    rng_seed=cfg.rng_seed * 3 + seed_off,
                    mode=cfg.mode,
                    payoff_token=f"{token}|mu={mu_prime!r}|{tag}" if token else None,
                ),
            )
        )
    res_minus = algorithm2(*sub_cfgs[0])
    res_plus = algorithm2(*sub_cfgs[1])

    mu_hat = sigma * (mu_prime - 4.0 * res_minus.mu_hat + 4.0 * res_plus.mu_hat)
    budget = {
        key: 4.0 * sigma * (res_minus.budget[key] + res_plus.budget[key])
        for key in ("eps_trunc", "eps_disc", "eps_qae")
    }
    return EstimateResult(
        mu_hat=mu_hat,
        budget=budget,
        grid_qubits=max(res_minus.grid_qubits, res_plus.grid_qubits),
        grover_power=res_minus.grover_power,
        true_grid_mean=sigma
        * (mu_prime - 4.0 * res_minus.true_grid_mean + 4.0 * res_plus.true_grid_mean),
        levels=[
            {"part": "probe", "mu_prime": mu_prime},
            {"part": "minus", "mu_hat": res_minus.mu_hat},
            {"part": "plus", "mu_hat": res_plus.mu_hat},
        ],
    )


# ---------------------------------------------------------------------------
# builtin payoffs


def _smoothclip(t: np.ndarray) -> np.ndarray:
    # C1 ramp: 0 below 0, t^2 (3 - 2t) on [0, 1], 1 above; |S''| <= 6
    tt = np.clip(t, 0.0, 1.0)
    return tt * tt * (3.0 - 2.0 * tt)


def _gaussian_bell(z1, z2):
    return np.exp(-0.5 * (z1 * z1 + z2 * z2))


def _sin_bounded(z1, z2):
    return 0.5 * (1.0 + np.sin(z1))


def _clipped_linear(z1, z2):
    return _smoothclip(0.5 + 0.25 * z1)


def _exp_z1(z1, z2):
    return np.exp(z1)


def _linear_z1(z1, z2):
    return z1 * np.ones_like(z2)


BUILTIN_PAYOFFS: dict[str, Payoff] = {
    # max (|z1|+|z2|) e^(-r^2/2) = sqrt(2) e^(-1/2); second-partial sum peaks at 2
    "gaussian-bell": Payoff(_gaussian_bell, math.sqrt(2.0) * math.exp(-0.5), 2.0, "gaussian-bell"),
    "sin-bounded": Payoff(_sin_bounded, 0.5, 0.5, "sin-bounded"),
    # smooth-clipped ramp S(1/2 + z1/4): D1 = 3/2 * 1/4, D2 = 6 * 1/16
    "clipped-linear": Payoff(_clipped_linear, 0.375, 0.375, "clipped-linear"),
    # derivatives equal the payoff, so every clamped band of exp(z1)/2^l is 1-Lipschitz
    "exp-z1": Payoff(_exp_z1, 1.0, 1.0, "exp-z1", level_d1=1.0, level_d2=1.0),
    "linear-z1": Payoff(_linear_z1, 1.0, 0.0, "linear-z1"),
}


def builtin_payoff(name: str) -> Payoff:
    try:
        return BUILTIN_PAYOFFS[name]
    except KeyError:
        raise ValueError(f"unknown payoff {name!r}; have {sorted(BUILTIN_PAYOFFS)}") from None
