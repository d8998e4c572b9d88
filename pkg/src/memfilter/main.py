"""Command-line entry point.

Usage:
  memfilter estimate --ybar 1 --alpha 0 --delta 0.5 --n 3
  memfilter estimate --y 0.4 1.1 1.5 --delta 0.5 --per-observation
  memfilter experiment --replicates 1000 --seed 7 --out runs/study
  memfilter experiment --alphas 0,0.5,1,2 --out runs/sweep
  memfilter profile --ybar 1 --delta 0.5 --alphas 0,1,1e6
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from memfilter import config
from memfilter.errors import MemFilterError, NumericFailureError
from memfilter.estimators.mem import alpha_profile, max_entropy_value, mem_closed_form, mem_per_observation
from memfilter.estimators.models import GibbsConfig, MemConfig, MleConfig, SampleBatch
from memfilter.experiment.harness import ALL_METHODS, run_alpha_sweep, run_experiment
from memfilter.experiment.models import ExperimentReport, SimConfig
from memfilter.storage.report_files import write_alpha_sweep, write_profile, write_report

logger = logging.getLogger("memfilter")

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memfilter", description="Entropic filtering of noisy exponential data")
    parser.add_argument(
        "--log-level", type=str.upper, default=config.LOG_LEVEL, choices=["DEBUG", "INFO", "WARNING", "ERROR"]
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="Filter one sample mean")
    src = est.add_mutually_exclusive_group(required=True)
    src.add_argument("--ybar", type=float, help="Sample mean")
    src.add_argument("--y", type=float, nargs="+", help="Individual measurements")
    est.add_argument("--alpha", type=float, default=config.ALPHA_MEM)
    est.add_argument("--delta", type=float, default=config.DELTA)
    est.add_argument("--n", type=int, default=None, help="Sample size (defaults to len(--y), else 3)")
    est.add_argument("--per-observation", action="store_true", help="Filter each --y value on its own (n = 1)")

    exp = sub.add_parser("experiment", help="Monte Carlo comparison of MEM, Gibbs and ML")
    exp.add_argument("--theta", type=float, default=config.THETA_TRUE)
    exp.add_argument("--delta", type=float, default=config.DELTA)
    exp.add_argument("--n", type=int, default=config.SAMPLE_SIZE)
    exp.add_argument("--replicates", type=int, default=config.REPLICATES)
    exp.add_argument("--seed", type=int, default=config.MASTER_SEED)
    exp.add_argument("--alpha", type=float, default=config.ALPHA_MEM)
    exp.add_argument("--method", choices=[*ALL_METHODS, "all"], default="all")
    exp.add_argument("--burn-in", type=int, default=config.BURN_IN)
    exp.add_argument("--draws", type=int, default=config.N_DRAWS)
    exp.add_argument(
        "--point-estimate",
        choices=["latent_mean", "inverse_rate_median", "inverse_rate_mean"],
        default="latent_mean",
    )
    exp.add_argument("--theta-min", type=float, default=None)
    exp.add_argument("--theta-max", type=float, default=None)
    exp.add_argument("--bins", type=int, default=config.HISTOGRAM_BINS)
    exp.add_argument("--range-lo", type=float, default=config.HISTOGRAM_RANGE[0])
    exp.add_argument("--range-hi", type=float, default=config.HISTOGRAM_RANGE[1])
    exp.add_argument("--workers", type=int, default=config.WORKERS)
    exp.add_argument("--alphas", type=_float_list, default=None, help="MEM-only sweep over these alpha values")
    exp.add_argument("--out", type=Path, default=None, help=f"Output directory (default {config.OUTPUT_DIR})")

    prof = sub.add_parser("profile", help="x̂*(α) and ê*(α) over an alpha grid")
    prof.add_argument("--ybar", type=float, required=True)
    prof.add_argument("--delta", type=float, default=config.DELTA)
    prof.add_argument("--n", type=int, default=config.SAMPLE_SIZE)
    prof.add_argument("--alphas", type=_float_list, default=None, help="Comma-separated grid")
    prof.add_argument("--alpha-min", type=float, default=1e-3)
    prof.add_argument("--alpha-max", type=float, default=1e3)
    prof.add_argument("--points", type=int, default=50, help="Log-spaced points when --alphas is not given")
    prof.add_argument("--out", type=Path, default=None, help="CSV file (default: stdout)")
    return parser


def _cmd_estimate(args: argparse.Namespace) -> int:
    if args.per_observation and args.y is None:
        raise argparse.ArgumentTypeError("--per-observation needs --y")

    if args.y is not None:
        batch = SampleBatch.from_values(args.y)
        if args.n is not None and args.n != batch.n:
            raise argparse.ArgumentTypeError(f"--n {args.n} does not match {batch.n} --y values")
        y_bar, n = batch.y_bar, batch.n
    else:
        batch = None
        y_bar, n = args.ybar, (args.n if args.n is not None else config.SAMPLE_SIZE)

    cfg = MemConfig(alpha=args.alpha, delta=args.delta, n=n)
    if args.per_observation:
        results = mem_per_observation(batch, cfg)
        payload = {
            "alpha": cfg.alpha,
            "delta": cfg.delta,
            "observations": [
                {"y": y, "lambda_star": r.lambda_star, "x_hat_star": r.x_hat_star, "e_hat_star": r.e_hat_star}
                for y, r in zip(batch.values, results)
            ],
        }
    else:
        res = mem_closed_form(y_bar, cfg)
        payload = {
            "y_bar": y_bar,
            "alpha": cfg.alpha,
            "delta": cfg.delta,
            "n": n,
            "lambda_star": res.lambda_star,
            "x_hat_star": res.x_hat_star,
            "e_hat_star": res.e_hat_star,
        }
        if cfg.alpha > 0:
            payload["dual_value"] = max_entropy_value(y_bar, cfg)

    print(json.dumps(payload, indent=2))
    return EXIT_OK


def _print_summary(report: ExperimentReport) -> None:
    print(f"{'method':<8}{'mean':>12}{'sd':>12}{'count':>8}{'boundary':>10}")
    for method, s in report.summary.items():
        print(f"{method:<8}{s.mean:>12.6f}{s.sd:>12.6f}{s.count:>8d}{s.boundary_count:>10d}")


def _cmd_experiment(args: argparse.Namespace) -> int:
    cfg = SimConfig(
        theta_true=args.theta,
        delta=args.delta,
        n=args.n,
        replicates=args.replicates,
        master_seed=args.seed,
        alpha_mem=args.alpha,
        histogram_bins=args.bins,
        histogram_range=(args.range_lo, args.range_hi),
    )
    out_dir = config.ensure_dirs(args.out)

    if args.alphas is not None:
        entries = run_alpha_sweep(cfg, args.alphas, workers=args.workers)
        write_alpha_sweep(entries, out_dir)
        print(f"{'alpha':>12}{'mean':>12}{'sd':>12}")
        for e in entries:
            print(f"{e.alpha:>12.6g}{e.summary.mean:>12.6f}{e.summary.sd:>12.6f}")
        return EXIT_OK

    gibbs_cfg = GibbsConfig(
        burn_in=args.burn_in,
        n_draws=args.draws,
        delta=args.delta,
        n=args.n,
        point_estimate=args.point_estimate,
    )
    mle_cfg = MleConfig(
        theta_min=args.theta_min,
        theta_max=args.theta_max,
        tol=config.ML_TOL,
        delta=args.delta,
        min_scale=config.THETA_MIN_SCALE,
        max_scale=config.THETA_MAX_SCALE,
    )
    methods = ALL_METHODS if args.method == "all" else (args.method,)
    report = run_experiment(cfg, gibbs_cfg, mle_cfg, methods=methods, workers=args.workers)
    write_report(report, out_dir)
    _print_summary(report)
    return EXIT_OK


def _cmd_profile(args: argparse.Namespace) -> int:
    if args.alphas is not None:
        alphas = args.alphas
    else:
        if not 0 < args.alpha_min < args.alpha_max or args.points < 2:
            raise argparse.ArgumentTypeError("log grid needs 0 < --alpha-min < --alpha-max and --points >= 2")
        alphas = [0.0, *np.geomspace(args.alpha_min, args.alpha_max, args.points).tolist()]

    rows = alpha_profile(args.ybar, args.delta, args.n, alphas)
    if args.out is None:
        write_profile(rows, sys.stdout)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with args.out.open("w", newline="", encoding="utf-8") as fh:
            write_profile(rows, fh)
        logger.info("Profile (%d rows) written to %s", len(rows), args.out)
    return EXIT_OK


COMMANDS = {"estimate": _cmd_estimate, "experiment": _cmd_experiment, "profile": _cmd_profile}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s %(levelname)-8s %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    try:
        return COMMANDS[args.command](args)
    except NumericFailureError:
        logger.exception("Numeric failure in %s", args.command)
        return EXIT_NUMERIC
    except (ValidationError, MemFilterError, argparse.ArgumentTypeError, OSError) as exc:
        print(f"memfilter {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
