from __future__ import annotations

import csv
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import TextIO

from memfilter.estimators.models import EstimateResult
from memfilter.experiment.models import AlphaSweepEntry, ExperimentReport, Histogram

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.json"
ESTIMATES_FILE = "estimates.csv"
SWEEP_FILE = "alpha_sweep.csv"


def fmt(value: float | None) -> str:
    """17 significant digits, enough for an exact float round trip; '' for missing."""
    if value is None:
        return ""
    return format(value, ".17g")


def _flag(value: bool | None) -> str:
    if value is None:
        return ""
    return "1" if value else "0"


def write_summary(report: ExperimentReport, out_dir: Path) -> Path:
    path = out_dir / SUMMARY_FILE
    payload = {
        "config": report.config.model_dump(mode="json"),
        "methods": report.methods,
        "summary": {m: s.model_dump() for m, s in report.summary.items()},
        "clamped": {
            m: {"below": h.clamped_below, "above": h.clamped_above} for m, h in report.histograms.items()
        },
    }
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def write_estimates(report: ExperimentReport, out_dir: Path) -> Path:
    path = out_dir / ESTIMATES_FILE
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["replicate", "mem", "bayes", "ml", "ml_boundary"])
        for row in report.per_replicate:
            writer.writerow([row.replicate, fmt(row.mem), fmt(row.bayes), fmt(row.ml), _flag(row.ml_boundary)])
    return path


def write_histogram(hist: Histogram, path: Path) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_lo", "bin_hi", "count"])
        for b in hist.bins:
            writer.writerow([fmt(b.bin_lo), fmt(b.bin_hi), b.count])
    return path


def write_report(report: ExperimentReport, out_dir: Path) -> list[Path]:
    """summary.json, estimates.csv and one hist_<method>.csv per method."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [write_summary(report, out_dir), write_estimates(report, out_dir)]
    for method, hist in report.histograms.items():
        written.append(write_histogram(hist, out_dir / f"hist_{method}.csv"))
    logger.info("Wrote %d files to %s", len(written), out_dir)
    return written


def write_alpha_sweep(entries: Sequence[AlphaSweepEntry], out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / SWEEP_FILE
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["alpha", "mean", "sd", "count"])
        for e in entries:
            writer.writerow([fmt(e.alpha), fmt(e.summary.mean), fmt(e.summary.sd), e.summary.count])
    written = [path]
    for i, e in enumerate(entries):
        written.append(write_histogram(e.histogram, out_dir / f"hist_mem_alpha{i:03d}.csv"))
    logger.info("Wrote alpha sweep (%d values) to %s", len(entries), out_dir)
    return written


def write_profile(rows: Sequence[tuple[float, EstimateResult]], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["alpha", "x_hat_star", "e_hat_star", "lambda_star"])
    for alpha, res in rows:
        writer.writerow([fmt(alpha), fmt(res.x_hat_star), fmt(res.e_hat_star), fmt(res.lambda_star)])


def read_profile(fh: TextIO) -> list[tuple[float, float, float, float]]:
    reader = csv.DictReader(fh)
    return [
        (float(r["alpha"]), float(r["x_hat_star"]), float(r["e_hat_star"]), float(r["lambda_star"]))
        for r in reader
    ]
