"""Monte Carlo comparison of the MEM, Gibbs and ML estimators of E(x) = 1/θ.

Every replicate owns a stream derived from (master_seed, replicate), draws its
data first and then feeds the same stream to the Gibbs chain. Results do not
depend on which methods run or on how many worker processes are used.
"""
from __future__ import annotations

import logging
import time
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import partial

from memfilter.errors import InvalidParameterError
from memfilter.estimators.bayes import run_chain
from memfilter.estimators.mem import mem_closed_form
from memfilter.estimators.mle import ml_estimate
from memfilter.estimators.models import GibbsConfig, MemConfig, MleConfig, SampleBatch
from memfilter.experiment.models import (
    AlphaSweepEntry,
    ExperimentReport,
    Method,
    MethodSummary,
    ReplicateEstimates,
    SimConfig,
)
from memfilter.experiment.stats import histogram, summarize
from memfilter.sampling.rng import RngStream, draw_exponential, draw_normal

logger = logging.getLogger(__name__)

ALL_METHODS: tuple[Method, ...] = ("mem", "bayes", "ml")


def simulate_batch(theta: float, delta: float, n: int, stream: RngStream) -> SampleBatch:
    """n observations y = x + e, the pair (x, e) redrawn until y > 0."""
    if not (theta > 0 and delta > 0 and n >= 1):
        raise InvalidParameterError(f"simulate_batch needs theta > 0, delta > 0, n >= 1 (got {theta}, {delta}, {n})")
    values: list[float] = []
    for _ in range(n):
        while True:
            x = draw_exponential(stream, theta)
            y = x + draw_normal(stream, 0.0, delta)
            if y > 0:
                values.append(y)
                break
    return SampleBatch.from_values(values)


def _check_configs(cfg: SimConfig, gibbs_cfg: GibbsConfig, mle_cfg: MleConfig) -> None:
    if gibbs_cfg.n != cfg.n or gibbs_cfg.delta != cfg.delta:
        raise InvalidParameterError(
            f"Gibbs config (n={gibbs_cfg.n}, delta={gibbs_cfg.delta}) does not match the study "
            f"(n={cfg.n}, delta={cfg.delta})"
        )
    if mle_cfg.delta != cfg.delta:
        raise InvalidParameterError(f"ML config delta={mle_cfg.delta} does not match the study delta={cfg.delta}")


def run_replicate(
    replicate: int,
    cfg: SimConfig,
    gibbs_cfg: GibbsConfig,
    mle_cfg: MleConfig,
    methods: Sequence[Method] = ALL_METHODS,
) -> ReplicateEstimates:
    stream = RngStream.for_replicate(cfg.master_seed, replicate)
    batch = simulate_batch(cfg.theta_true, cfg.delta, cfg.n, stream)
    out = ReplicateEstimates(replicate=replicate, y_bar=batch.y_bar)

    if "mem" in methods:
        out.mem = mem_closed_form(batch.y_bar, MemConfig(alpha=cfg.alpha_mem, delta=cfg.delta, n=cfg.n)).x_hat_star
    if "bayes" in methods:
        out.bayes = run_chain(batch, gibbs_cfg, stream).point_estimate
    if "ml" in methods:
        fit = ml_estimate(batch, mle_cfg)
        out.ml = fit.mean_estimate
        out.ml_boundary = fit.at_boundary

    logger.debug("replicate %d: y_bar=%.6f mem=%s bayes=%s ml=%s", replicate, batch.y_bar, out.mem, out.bayes, out.ml)
    return out


def _map_replicates(fn, replicates: Iterable[int], workers: int) -> list:
    if workers <= 1:
        return [fn(r) for r in replicates]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order, which keeps the merge deterministic.
        return list(pool.map(fn, replicates, chunksize=16))


def run_experiment(
    cfg: SimConfig,
    gibbs_cfg: GibbsConfig,
    mle_cfg: MleConfig,
    methods: Sequence[Method] = ALL_METHODS,
    workers: int = 1,
) -> ExperimentReport:
    _check_configs(cfg, gibbs_cfg, mle_cfg)
    selected = [m for m in ALL_METHODS if m in methods]
    if not selected:
        raise InvalidParameterError(f"no known method in {list(methods)}")

    logger.info(
        "Running %d replicates (theta=%g, delta=%g, n=%d, seed=%d, methods=%s, workers=%d)",
        cfg.replicates, cfg.theta_true, cfg.delta, cfg.n, cfg.master_seed, ",".join(selected), workers,
    )
    started = time.monotonic()
    task = partial(run_replicate, cfg=cfg, gibbs_cfg=gibbs_cfg, mle_cfg=mle_cfg, methods=tuple(selected))
    rows: list[ReplicateEstimates] = _map_replicates(task, range(cfg.replicates), workers)

    summary: dict[str, MethodSummary] = {}
    histograms = {}
    for method in selected:
        values = [getattr(r, method) for r in rows]
        mean, sd = summarize(values)
        boundary = sum(1 for r in rows if r.ml_boundary) if method == "ml" else 0
        summary[method] = MethodSummary(mean=mean, sd=sd, count=len(values), boundary_count=boundary)
        histograms[method] = histogram(values, cfg.histogram_bins, cfg.histogram_range)

    if "ml" in summary and summary["ml"].boundary_count:
        logger.warning("%d of %d ML fits hit the upper rate bound", summary["ml"].boundary_count, cfg.replicates)
    logger.info("Experiment done in %.1fs", time.monotonic() - started)
    return ExperimentReport(
        config=cfg, methods=selected, per_replicate=rows, summary=summary, histograms=histograms
    )


def _simulate_replicate(replicate: int, cfg: SimConfig) -> SampleBatch:
    return simulate_batch(cfg.theta_true, cfg.delta, cfg.n, RngStream.for_replicate(cfg.master_seed, replicate))


def run_alpha_sweep(cfg: SimConfig, alphas: Sequence[float], workers: int = 1) -> list[AlphaSweepEntry]:
    """MEM over the same simulated batches at each α of the grid."""
    if not alphas:
        raise InvalidParameterError("alpha sweep needs at least one alpha")
    if any(not a >= 0 for a in alphas):
        raise InvalidParameterError(f"alphas must be nonnegative, got {list(alphas)}")

    logger.info("Sweeping %d alpha values over %d replicates", len(alphas), cfg.replicates)
    batches = _map_replicates(partial(_simulate_replicate, cfg=cfg), range(cfg.replicates), workers)

    entries = []
    for alpha in alphas:
        mem_cfg = MemConfig(alpha=alpha, delta=cfg.delta, n=cfg.n)
        values = [mem_closed_form(b.y_bar, mem_cfg).x_hat_star for b in batches]
        mean, sd = summarize(values)
        entries.append(
            AlphaSweepEntry(
                alpha=alpha,
                summary=MethodSummary(mean=mean, sd=sd, count=len(values)),
                histogram=histogram(values, cfg.histogram_bins, cfg.histogram_range),
            )
        )
    return entries
