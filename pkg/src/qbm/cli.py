"""The `qbm` command line: CSV/JSON artifacts for every capability.

Subcommands
    samples    sample CSV/JSON + metric report + QQ/histogram CSVs
    resources  the resource table next to published reference values
    sweep      (n, d, M) -> (eps_exp, eps_quantile) long-format CSV
    estimate   one estimator run with its full error budget as JSON
    bounds     the Riemann lemma suite over built-in test functions

Every command is deterministic given --seed; a manifest.json capturing the
command, parameters, seed, tool version and output paths is written last.
Exit status is 0 only if all requested outputs were written and the
internal spot checks passed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__, boxmuller, estimators, metrics, resources
from .bounds import RiemannProblem, riemann_mid_1d, riemann_mid_2d, riemann_right_1d, riemann_right_2d
from .errors import QbmError
from .fixedpoint import FixedPointFormat
from .qae import QAEConfig

MAX_GRID_QUBITS = 13  # per-axis guardrail; --allow-large overrides


def _thread_cap() -> int | None:
    raw = os.environ.get("QBM_THREADS")
    if raw is None:
        return None
    cap = int(raw)
    if cap < 1:
        raise ValueError("QBM_THREADS must be >= 1")
    return cap


def _write_manifest(out_dir: str, command: str, params: dict, seed: int, paths: list[str]) -> str:
    manifest = {
        "command": command,
        "params": params,
        "seed": seed,
        "tool_version": __version__,
        "output_paths": sorted(paths),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def _write_csv(path: str, header: str, rows: list[str]) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def _metric_csvs(report: metrics.MetricReport, out_dir: str) -> list[str]:
    qq_path = os.path.join(out_dir, "qq.csv")
    _write_csv(
        qq_path,
        "p,q_exact,q_sample",
        [f"{p!r},{qe!r},{qs!r}" for p, qe, qs in report.qq],
    )
    hist_path = os.path.join(out_dir, "hist.csv")
    _write_csv(
        hist_path,
        "bin_left,bin_right,count",
        [f"{lo!r},{hi!r},{cnt}" for lo, hi, cnt in report.histogram],
    )
    return [qq_path, hist_path]


def cmd_samples(args: argparse.Namespace) -> int:
    if args.grid_qubits > MAX_GRID_QUBITS and not args.allow_large:
        raise QbmError(
            f"grid-qubits {args.grid_qubits} exceeds the desk-scale cap "
            f"{MAX_GRID_QUBITS}; pass --allow-large to override"
        )
    os.makedirs(args.out, exist_ok=True)

    if args.mini_approx:
        if args.mode != "fixedpoint":
            raise QbmError("--mini-approx requires --mode fixedpoint")
        pipe = boxmuller.mini_pipeline(args.word_bits, args.int_bits)
        grid = boxmuller.mini_grid(args.grid_qubits)
    else:
        grid = boxmuller.GridConfig(
            args.grid_qubits, args.u_min, args.u_max, args.v_min, args.v_max,
            convention=args.convention,
        )
        if args.mode == "fixedpoint":
            fmt = FixedPointFormat(args.word_bits, args.int_bits)
            pipe = boxmuller.standard_pipeline(fmt, pieces=args.pieces, degree=args.degree)
        else:
            pipe = None

    samples = boxmuller.generate_samples(grid, pipe if pipe is not None else "exact")
    if len(samples) != grid.n_per_axis**2:
        raise QbmError("internal check failed: sample count != N^2")
    if args.rho != 0.0:
        samples = boxmuller.correlate(samples, boxmuller.CorrelationSpec(args.rho))

    paths = []
    if args.format in ("csv", "both"):
        csv_path = os.path.join(args.out, "samples.csv")
        samples.to_csv(csv_path)
        paths.append(csv_path)
    if args.format in ("json", "both"):
        json_path = os.path.join(args.out, "samples.json")
        samples.to_json(json_path)
        paths.append(json_path)

    rep = metrics.report(samples)
    rep_path = os.path.join(args.out, "report.json")
    with open(rep_path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(rep.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    paths.append(rep_path)
    paths.extend(_metric_csvs(rep, args.out))

    paths.append(_write_manifest(args.out, "samples", _params_dict(args), args.seed, paths))
    return 0


def cmd_resources(args: argparse.Namespace) -> int:
    os.makedirs(args.out, exist_ok=True)
    rows = resources.table2(mode=args.mode)
    paths = []
    if args.format == "csv":
        path = os.path.join(args.out, "table2.csv")
        _write_csv(
            path,
            "n,t_count,t_count_paper,t_depth,t_depth_paper,qubits,qubits_paper",
            [
                f"{r['n']},{r['t_count']},{r['t_count_paper']},{r['t_depth']},"
                f"{r['t_depth_paper']},{r['qubits']},{r['qubits_paper']}"
                for r in rows
            ],
        )
    else:
        path = os.path.join(args.out, "table2.json")
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            json.dump(rows, fh, sort_keys=True, indent=2)
            fh.write("\n")
    paths.append(path)
    paths.append(_write_manifest(args.out, "resources", _params_dict(args), args.seed, paths))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    os.makedirs(args.out, exist_ok=True)
    n_values = list(range(args.n_min, args.n_max + 1))
    d_values = list(range(args.d_min, args.d_max + 1))
    m_values = [int(x) for x in args.pieces_list.split(",")]
    rows = []
    for n in n_values:
        fmt = FixedPointFormat(n, args.int_bits)
        lsb = fmt.resolution
        u_min = max(lsb, args.sweep_u_min)
        grid = boxmuller.GridConfig(args.grid_qubits, u_min, 1.0 - lsb)
        for d in d_values:
            for m in m_values:
                pipe = boxmuller.standard_pipeline(fmt, pieces=m, degree=d)
                ss = boxmuller.generate_samples(grid, pipe)
                pooled = ss.pooled()
                rows.append((n, args.int_bits, d, m,
                             metrics.exp_error(pooled), metrics.quantile_error(pooled)))
    path = os.path.join(args.out, "sweep.csv")
    lines = []
    for n, p, d, m, e_exp, e_q in rows:
        lines.append(f"eps_exp,{n},{p},{d},{m},{e_exp!r}")
        lines.append(f"eps_quantile,{n},{p},{d},{m},{e_q!r}")
    _write_csv(path, "metric,n,p,d,M,value", lines)
    paths = [path]
    paths.append(_write_manifest(args.out, "sweep", _params_dict(args), args.seed, paths))
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    os.makedirs(args.out, exist_ok=True)
    payoff = estimators.builtin_payoff(args.payoff)
    if args.algorithm == "bounded":
        cfg = estimators.recipe_algo1_config(
            args.epsilon, mu_hint=args.mu_hint, rng_seed=args.seed,
            payoff_token=args.payoff,
        )
        result = estimators.algorithm1(payoff, cfg)
    elif args.algorithm == "l2":
        result = estimators.algorithm2(
            payoff,
            estimators.Case2Config(
                B=args.payoff_bound, epsilon=args.epsilon, delta=args.delta,
                max_grid_qubits=args.max_grid_qubits, rng_seed=args.seed,
                payoff_token=args.payoff,
            ),
        )
    elif args.algorithm == "variance":
        result = estimators.algorithm3(
            payoff,
            estimators.Case3Config(
                sigma=args.sigma, epsilon=args.epsilon, rng_seed=args.seed,
                max_grid_qubits=args.max_grid_qubits, payoff_token=args.payoff,
            ),
        )
    else:  # pragma: no cover - argparse restricts choices
        raise QbmError(f"unknown algorithm {args.algorithm}")
    if any(v < 0 for v in result.budget.values()):
        raise QbmError("internal check failed: negative budget entry")
    path = os.path.join(args.out, "estimate.json")
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(result.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    paths = [path]
    paths.append(_write_manifest(args.out, "estimate", _params_dict(args), args.seed, paths))
    return 0


def _bounds_suite() -> list[dict]:
    cases = [
        ("right_1d", riemann_right_1d,
         RiemannProblem(lambda x: x, (0.0, 1.0), 4, (1.0,))),
        ("right_1d_const", riemann_right_1d,
         RiemannProblem(lambda x: 0.75, (0.0, 1.0), 4, (0.0,))),
        ("right_2d", riemann_right_2d,
         RiemannProblem(lambda x, y: x + y, (0.0, 1.0), 4, (1.0, 1.0))),
        ("mid_1d_linear", riemann_mid_1d,
         RiemannProblem(lambda x: x, (0.0, 1.0), 4, (0.0,))),
        ("mid_1d_square", riemann_mid_1d,
         RiemannProblem(lambda x: x * x, (0.0, 1.0), 1, (2.0,))),
        ("mid_2d_square", riemann_mid_2d,
         RiemannProblem(lambda x, y: x * x + y * y, (0.0, 1.0), 2, (2.0, 2.0))),
        ("mid_2d_bilinear", riemann_mid_2d,
         RiemannProblem(lambda x, y: x * y, (0.0, 1.0), 4, (0.0, 0.0))),
        ("right_1d_sin", riemann_right_1d,
         RiemannProblem(math.sin, (0.0, 2.0), 16, (1.0,))),
        ("mid_1d_sin", riemann_mid_1d,
         RiemannProblem(math.sin, (0.0, 2.0), 16, (1.0,))),
    ]
    out = []
    for name, rule, prob in cases:
        res = rule(prob)
        out.append({"case": name, **res.to_dict()})
    return out


def cmd_bounds(args: argparse.Namespace) -> int:
    os.makedirs(args.out, exist_ok=True)
    rows = _bounds_suite()
    if any(r["error"] > r["bound"] + 1e-12 for r in rows):
        raise QbmError("internal check failed: a Riemann bound was violated")
    path = os.path.join(args.out, "bounds.csv")
    _write_csv(
        path,
        "case,sum,integral,error,bound",
        [f"{r['case']},{r['sum']!r},{r['integral']!r},{r['error']!r},{r['bound']!r}" for r in rows],
    )
    paths = [path]
    paths.append(_write_manifest(args.out, "bounds", _params_dict(args), args.seed, paths))
    return 0


def _params_dict(args: argparse.Namespace) -> dict:
    skip = {"func", "out", "seed"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qbm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("samples", help="generate a grid sample multiset")
    p.add_argument("--grid-qubits", type=int, default=5)
    p.add_argument("--word-bits", type=int, default=16)
    p.add_argument("--int-bits", type=int, default=4)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--pieces", type=int, default=32)
    p.add_argument("--u-min", type=float, default=1e-3)
    p.add_argument("--u-max", type=float, default=0.999)
    p.add_argument("--v-min", type=float, default=0.0)
    p.add_argument("--v-max", type=float, default=1.0)
    p.add_argument("--convention", choices=["midpoint", "endpoint"], default="midpoint")
    p.add_argument("--mode", choices=["exact", "fixedpoint"], default="exact")
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--mini-approx", action="store_true",
                   help="hand-picked linear sin/radius, integer grid, exact dyadics")
    p.add_argument("--format", choices=["csv", "json", "both"], default="csv")
    p.add_argument("--allow-large", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_samples)

    p = sub.add_parser("resources", help="resource table vs published values")
    p.add_argument("table", choices=["table2"], help="which table to emit")
    p.add_argument("--mode", choices=["paper_fit", "compositional"], default="paper_fit")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_resources)

    p = sub.add_parser("sweep", help="(n, d, M) error sweep CSV")
    p.add_argument("--n-min", type=int, default=10)
    p.add_argument("--n-max", type=int, default=19)
    p.add_argument("--d-min", type=int, default=1)
    p.add_argument("--d-max", type=int, default=4)
    p.add_argument("--pieces-list", default="2,4,8,16,32,64")
    p.add_argument("--int-bits", type=int, default=4,
                   help="4 suits the desk-scale n range; use 10 with n >= 20")
    p.add_argument("--grid-qubits", type=int, default=7)
    p.add_argument("--sweep-u-min", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("estimate", help="run one estimator with its budget")
    p.add_argument("--algorithm", choices=["bounded", "l2", "variance"], required=True)
    p.add_argument("--payoff", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--payoff-bound", type=float, default=math.e,
                   help="B with E[payoff^2] <= B^2 (l2 case)")
    p.add_argument("--mu-hint", type=float, default=1.0)
    p.add_argument("--max-grid-qubits", type=int, default=11)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("bounds", help="Riemann lemma suite on builtin functions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bounds)

    return parser


def main(argv: list[str] | None = None) -> int:
    _thread_cap()  # validates the env var; work is vectorized single-process
    parser = build_parser()
    args = parser.parse_args(argv)
    np.random.seed(args.seed)  # belt and braces; all RNG paths take seeds explicitly
    try:
        return args.func(args)
    except QbmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
