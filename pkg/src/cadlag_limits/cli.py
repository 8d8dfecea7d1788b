"""Command-line entry point: ``cadlag-limits <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from .limits import (
    default_block_length,
    estimate_theta_blocks,
    karamata_ratio,
    nu_u_estimate,
    sample_an,
    small_jump_statistic,
    spectral_theta_terms,
    tail_window_array,
)
from .metrics import DEFAULT_TOL, m1_distance, strong_m1_lower_bound, uniform_distance, weak_m1_distance
from .models import MODELS, ModelConfig, simulate
from .paths import StepFunction

ESTIMATOR_COLUMNS = ("estimator", "model", "alpha", "n", "u", "r_n", "value", "stderr")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=MODELS, default="iid_pareto")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--q", type=int, default=0, help="lag order for the lagged model")
    p.add_argument("--d", type=int, default=1, help="dimension for the sre model")
    p.add_argument("--burn-in", type=int, default=10_000)


def _model_config(args) -> ModelConfig:
    return ModelConfig(args.alpha, args.model, args.n, args.seed, q=args.q, d=args.d, burn_in=args.burn_in)


def _fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else format(v, ".12g")
    return "" if v is None else str(v)


def _write_estimates(rows: list[dict], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(ESTIMATOR_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in ESTIMATOR_COLUMNS])


def _row(estimator, mc: ModelConfig, value, stderr=float("nan"), u=None, r_n=None) -> dict:
    return {"estimator": estimator, "model": mc.label(), "alpha": mc.alpha, "n": mc.n, "u": u,
            "r_n": r_n, "value": float(value), "stderr": float(stderr)}


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else float("nan")
    return float(x.mean()), se


# commands -----------------------------------------------------------------


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json_file(args.config, experiment=args.command, seed=args.seed,
                                          replications=args.replications)
    out = args.out or cfg.output
    report = run_experiment(cfg)
    if out:
        report.write(out)
    else:
        sys.stdout.write(report.to_csv())
    for note in report.notes:
        print(f"note: {note}", file=sys.stderr)
    return report.exit_code()


def cmd_distance(args) -> int:
    x = StepFunction.from_json(Path(args.a).read_text())
    y = StepFunction.from_json(Path(args.b).read_text())
    if args.metric == "uniform":
        out = {"metric": "uniform", "value": uniform_distance(x, y)}
    elif args.metric == "m1":
        out = {"metric": "m1", **m1_distance(x, y, args.tol).to_dict()}
    elif args.metric == "wm1":
        out = {"metric": "wm1", **weak_m1_distance(x, y, args.tol).to_dict()}
    else:
        c = _floats(args.c) if args.c else [1.0] + [-1.0] * (x.dim - 1)
        out = {"metric": "strong-lb", "c": c, "value": strong_m1_lower_bound(x, y, c, args.tol)}
    print(json.dumps(out))
    return 0


def cmd_simulate(args) -> int:
    s = simulate(_model_config(args))
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.format == "json":
            json.dump({"config": s.config.to_dict(), "values": s.values.tolist()}, out)
            out.write("\n")
        else:
            w = csv.writer(out, lineterminator="\n")
            w.writerow([f"x{j + 1}" for j in range(s.dim)])
            for row in s.values:
                w.writerow([format(v, ".17g") for v in row])
    finally:
        if args.out:
            out.close()
    return 0


def cmd_theta(args) -> int:
    mc = _model_config(args)
    s = simulate(mc)
    r = args.r_n or default_block_length(mc.n)
    a = sample_an(s)
    rows = []
    if args.estimator in ("blocks", "both"):
        rows.append(_row("theta_blocks", mc, estimate_theta_blocks(s, mc.alpha, args.u, r, a_n=a), u=args.u, r_n=r))
    if args.estimator in ("spectral", "both"):
        _, W = tail_window_array(s, a * args.u, args.m)
        value, se = _mean_se(spectral_theta_terms(W, mc.alpha))
        rows.append(_row("theta_spectral", mc, value, se, u=args.u, r_n=r))
    _write_estimates(rows, sys.stdout)
    return 0


def cmd_tailproc(args) -> int:
    mc = _model_config(args)
    s = simulate(mc)
    threshold = sample_an(s) * args.u
    centers, W = tail_window_array(s, threshold, args.m)
    if args.windows:
        Path(args.windows).write_text(json.dumps(
            [{"center": int(c), "window": w.tolist()} for c, w in zip(centers, W)]
        ))
    rows = [_row("tail_windows", mc, W.shape[0], u=args.u)]
    norms = np.max(np.abs(W), axis=2) if W.shape[0] else np.zeros((0, 2 * args.m + 1))
    for lag in range(-args.m, args.m + 1):
        col = norms[:, args.m + lag]
        value = float(np.median(col)) if col.size else float("nan")
        rows.append(_row(f"median_norm_lag{lag}", mc, value, u=args.u))
    _write_estimates(rows, sys.stdout)
    return 0


def cmd_nu(args) -> int:
    mc = _model_config(args)
    s = simulate(mc)
    _, W = tail_window_array(s, args.threshold, args.m)
    xs = _floats(args.x)
    est = nu_u_estimate(W, mc.alpha, args.u, xs)
    rows = [_row(f"nu_x{x:g}", mc, e, u=args.u) for x, e in zip(xs, est)]
    _write_estimates(rows, sys.stdout)
    return 0


def cmd_smalljump(args) -> int:
    mc = _model_config(args)
    s = simulate(mc)
    rows = [_row("small_jump", mc, small_jump_statistic(s, mc.alpha, u), u=u) for u in _floats(args.u)]
    _write_estimates(rows, sys.stdout)
    return 0


def cmd_karamata(args) -> int:
    mc = ModelConfig(args.alpha, "iid_pareto", args.n)
    rows = [_row("karamata", mc, karamata_ratio(args.alpha, u, args.n), 0.0, u=u) for u in _floats(args.u)]
    _write_estimates(rows, sys.stdout)
    return 0


# parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cadlag-limits", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", help="output directory (default: config 'output', else CSV to stdout)")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--replications", type=int, help="override the replication count")
        p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("distance", help="distance between two step paths in JSON")
    p.add_argument("--metric", choices=("m1", "wm1", "uniform", "strong-lb"), default="wm1")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--c", help="comma-separated coefficients for strong-lb (default 1,-1,...)")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("simulate", help="draw one sample path of a model")
    _model_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("theta", help="extremal index estimates")
    _model_args(p)
    p.add_argument("--u", type=float, default=1.0)
    p.add_argument("--r-n", type=int)
    p.add_argument("--m", type=int, default=10, help="tail window half-width")
    p.add_argument("--estimator", choices=("blocks", "spectral", "both"), default="both")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("tailproc", help="tail-process windows around exceedances of a_n u")
    _model_args(p)
    p.add_argument("--u", type=float, default=1.0)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--windows", help="also write the windows to this JSON file")
    p.set_defaults(func=cmd_tailproc)

    p = sub.add_parser("nu", help="Monte Carlo nu^(u)((x, inf)) from tail windows")
    _model_args(p)
    p.add_argument("--u", type=float, default=0.5)
    p.add_argument("--threshold", type=float, required=True, help="window threshold on |X_t|")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--x", default="0.5,1,2", help="comma-separated x grid")
    p.set_defaults(func=cmd_nu)

    p = sub.add_parser("smalljump", help="centred small-jump maximal sum")
    _model_args(p)
    p.add_argument("--u", default="0.01,0.1,0.5", help="comma-separated u grid in (0, 1]")
    p.set_defaults(func=cmd_smalljump)

    p = sub.add_parser("karamata", help="closed-form truncated-mean ratio for Pareto noise")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--u", default="0.5", help="comma-separated u grid")
    p.set_defaults(func=cmd_karamata)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OverflowError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
