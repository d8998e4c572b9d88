"""Check a full Monte Carlo study against the target bands in eval/targets.json.

Usage:
  uv run python -m memfilter.eval_run
  uv run python -m memfilter.eval_run --seed 7 --workers 4
"""
from __future__ import annotations

import argparse
import json
import logging
from datetime import datetime, timezone
from pathlib import Path

from pydantic_evals import Case, Dataset
from pydantic_evals.evaluators import Evaluator, EvaluatorContext

from memfilter import config
from memfilter.estimators.models import GibbsConfig, MleConfig
from memfilter.experiment.harness import run_experiment
from memfilter.experiment.models import MethodSummary, SimConfig

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)-8s %(message)s")
logger = logging.getLogger("memfilter.eval_run")

EVAL_DIR = Path(__file__).resolve().parents[2] / "eval"
TARGETS_PATH = EVAL_DIR / "targets.json"
RESULTS_PATH = EVAL_DIR / "results.jsonl"


def _in_band(value: float, band: list[float]) -> bool:
    lo, hi = band
    return lo <= value <= hi


class MeanInBand(Evaluator[str, MethodSummary, dict]):
    """Sample mean of the replicate estimates inside the accepted band."""

    def evaluate(self, ctx: EvaluatorContext[str, MethodSummary, dict]) -> bool:
        return _in_band(ctx.output.mean, ctx.metadata["mean_band"])


class SdInBand(Evaluator[str, MethodSummary, dict]):
    def evaluate(self, ctx: EvaluatorContext[str, MethodSummary, dict]) -> bool:
        return _in_band(ctx.output.sd, ctx.metadata["sd_band"])


class ReferenceMeanGap(Evaluator[str, MethodSummary, dict]):
    """Absolute distance of the sample mean from the reference value."""

    def evaluate(self, ctx: EvaluatorContext[str, MethodSummary, dict]) -> float:
        return abs(ctx.output.mean - ctx.metadata["reference_mean"])


def build_dataset(targets: dict) -> Dataset[str, MethodSummary, dict]:
    cases = [
        Case(name=method, inputs=method, metadata=spec)
        for method, spec in targets["methods"].items()
    ]
    return Dataset(name="memfilter", cases=cases, evaluators=[MeanInBand(), SdInBand(), ReferenceMeanGap()])


def summarize_report(report, seed: int) -> dict:
    """Flatten an evaluation report into one results.jsonl line."""
    passed = {
        c.name: all(a.value for a in c.assertions.values())
        for c in report.cases
    }
    return {
        "timestamp": datetime.now(timezone.utc).strftime("%Y%m%dT%H%M"),
        "seed": seed,
        "passed": passed,
        "all_passed": all(passed.values()) and not report.failures,
        "failures": len(report.failures),
    }


def study_configs(targets: dict, seed: int) -> tuple[SimConfig, GibbsConfig, MleConfig]:
    """Study, chain and ML settings for the targets file, with the same env defaults as the CLI."""
    cfg = SimConfig(master_seed=seed, **targets["config"])
    gibbs_cfg = GibbsConfig(burn_in=config.BURN_IN, n_draws=config.N_DRAWS, delta=cfg.delta, n=cfg.n)
    mle_cfg = MleConfig(
        delta=cfg.delta,
        tol=config.ML_TOL,
        min_scale=config.THETA_MIN_SCALE,
        max_scale=config.THETA_MAX_SCALE,
    )
    return cfg, gibbs_cfg, mle_cfg


def run() -> None:
    parser = argparse.ArgumentParser(description="Run the Monte Carlo acceptance eval")
    parser.add_argument("--seed", type=int, default=config.MASTER_SEED)
    parser.add_argument("--workers", type=int, default=config.WORKERS)
    args = parser.parse_args()

    if not TARGETS_PATH.exists():
        logger.error("No targets file at %s", TARGETS_PATH)
        return
    targets = json.loads(TARGETS_PATH.read_text())

    cfg, gibbs_cfg, mle_cfg = study_configs(targets, args.seed)

    logger.info("Running study: seed=%d, replicates=%d, workers=%d", args.seed, cfg.replicates, args.workers)
    experiment = run_experiment(cfg, gibbs_cfg, mle_cfg, workers=args.workers)

    def study_task(method: str) -> MethodSummary:
        return experiment.summary[method]

    dataset = build_dataset(targets)
    report = dataset.evaluate_sync(study_task, max_concurrency=1)
    report.print(include_input=True, include_output=True)

    summary = summarize_report(report, args.seed)
    summary["summary"] = {m: s.model_dump() for m, s in experiment.summary.items()}
    with open(RESULTS_PATH, "a") as f:
        f.write(json.dumps(summary) + "\n")

    logger.info("Results appended to %s", RESULTS_PATH)
    logger.info("Eval %s: %s", "passed" if summary["all_passed"] else "FAILED", summary["passed"])


if __name__ == "__main__":
    run()
