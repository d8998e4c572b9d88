"""Gibbs sampler for the exponential mean under Gaussian noise and Jeffreys prior.

Model: y_i = x + e_i, e_i ~ N(0, δ²), x ~ Exp(θ), π(θ) ∝ 1/θ. The full
conditionals are

    x | θ, y ~ N(ŷ − θδ²/n, δ²/n) restricted to x > 0
    θ | x    ~ Exp(rate x)

Under the improper prior the θ-marginal has no finite mean of 1/θ, and the
chain makes long excursions toward x → 0. The replicate point estimate is
therefore taken from the latent mean x by default.
"""
from __future__ import annotations

import logging
import math
import sys

import numpy as np

from memfilter.errors import InvalidParameterError
from memfilter.estimators.models import GibbsConfig, GibbsState, PosteriorSummary, SampleBatch
from memfilter.sampling.rng import POSITIVE_FLOOR, RngStream, draw_exponential, draw_truncated_normal_positive

logger = logging.getLogger(__name__)

MEAN_FLOOR = 1e-6


def gibbs_step(state: GibbsState, y_bar: float, cfg: GibbsConfig, stream: RngStream) -> GibbsState:
    # Excursions toward x → 0 push θ past the float range; both conditionals are
    # clamped so the step stays total.
    mean = max(y_bar - state.theta * cfg.delta**2 / cfg.n, -sys.float_info.max)
    x = draw_truncated_normal_positive(stream, mean, cfg.delta / math.sqrt(cfg.n))
    theta = min(draw_exponential(stream, x), sys.float_info.max)
    return GibbsState(x=x, theta=theta)


def _moments(draws: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(draws))
    sd = float(np.std(draws, ddof=1)) if draws.size > 1 else 0.0
    return mean, sd


def run_chain(batch: SampleBatch, cfg: GibbsConfig, stream: RngStream) -> PosteriorSummary:
    if batch.n != cfg.n:
        raise InvalidParameterError(f"batch has {batch.n} observations but the chain is configured for n={cfg.n}")

    y_bar = batch.y_bar
    theta0 = 1.0 / max(y_bar, MEAN_FLOOR)
    x0 = draw_truncated_normal_positive(stream, y_bar - theta0 * cfg.delta**2 / cfg.n, cfg.delta / math.sqrt(cfg.n))
    state = GibbsState(x=x0, theta=theta0)

    for _ in range(cfg.burn_in):
        state = gibbs_step(state, y_bar, cfg, stream)

    inverse_rates = np.empty(cfg.n_draws)
    latent = np.empty(cfg.n_draws)
    for k in range(cfg.n_draws):
        state = gibbs_step(state, y_bar, cfg, stream)
        inverse_rates[k] = 1.0 / state.theta
        latent[k] = state.x

    floored = int(np.count_nonzero(latent <= POSITIVE_FLOOR))
    if floored:
        logger.debug("chain hit the latent floor on %d of %d draws (y_bar=%.4f)", floored, cfg.n_draws, y_bar)

    mean, sd = _moments(inverse_rates)
    x_mean, x_sd = _moments(latent)
    if cfg.point_estimate == "latent_mean":
        point = x_mean
    elif cfg.point_estimate == "inverse_rate_median":
        point = float(np.median(inverse_rates))
    else:
        point = mean

    logger.debug("chain done: y_bar=%.4f E[x]=%.4f median(1/theta)=%.4f", y_bar, x_mean, np.median(inverse_rates))
    return PosteriorSummary(
        draws_of_Ex=inverse_rates.tolist(),
        mean=mean,
        sd=sd,
        draws_of_x=latent.tolist(),
        x_mean=x_mean,
        x_sd=x_sd,
        point_estimate=point,
        floored_draws=floored,
    )
