"""Maximum likelihood for the exponential rate observed through Gaussian noise.

Each observation has the exponentially modified Gaussian density

    f_θ(t) = θ exp(−θt + (θδ)²/2) Φ((t − θδ²)/δ),

which is evaluated in log space so the Gaussian tail factor never underflows.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Sequence

from scipy.optimize import minimize_scalar

from memfilter.errors import DomainError, InvalidParameterError, NumericFailureError
from memfilter.estimators.models import MleConfig, MlEstimate, SampleBatch
from memfilter.special import log_std_normal_cdf

logger = logging.getLogger(__name__)

MAX_BRENT_ITERATIONS = 500


def _check_rate_and_noise(theta: float, delta: float) -> None:
    if not (math.isfinite(theta) and theta > 0):
        raise InvalidParameterError(f"theta must be positive and finite, got {theta}")
    if not (math.isfinite(delta) and delta > 0):
        raise InvalidParameterError(f"delta must be positive and finite, got {delta}")


def log_density_convolution(t: float, theta: float, delta: float) -> float:
    _check_rate_and_noise(theta, delta)
    if not math.isfinite(t):
        raise InvalidParameterError(f"observation must be finite, got {t}")
    return math.log(theta) - theta * t + 0.5 * (theta * delta) ** 2 + log_std_normal_cdf((t - theta * delta**2) / delta)


def density_convolution(t: float, theta: float, delta: float) -> float:
    return math.exp(log_density_convolution(t, theta, delta))


def log_likelihood(ts: Sequence[float], theta: float, delta: float) -> float:
    """n ln θ − θΣt + n(θδ)²/2 + Σ ln Φ((t_i − θδ²)/δ)."""
    if len(ts) == 0:
        raise InvalidParameterError("log_likelihood needs at least one observation")
    _check_rate_and_noise(theta, delta)
    n = len(ts)
    shift = theta * delta**2
    tail = math.fsum(log_std_normal_cdf((t - shift) / delta) for t in ts)
    return n * math.log(theta) - theta * math.fsum(ts) + 0.5 * n * (theta * delta) ** 2 + tail


def ml_estimate(batch: SampleBatch, cfg: MleConfig) -> MlEstimate:
    """Maximize the likelihood over [theta_min, theta_max] by bounded Brent on ln θ."""
    theta_min, theta_max = cfg.bounds(batch.y_bar)
    ts = batch.values

    def objective(log_theta: float) -> float:
        return -log_likelihood(ts, math.exp(log_theta), cfg.delta)

    res = minimize_scalar(
        objective,
        bounds=(math.log(theta_min), math.log(theta_max)),
        method="bounded",
        options={"xatol": cfg.tol, "maxiter": MAX_BRENT_ITERATIONS},
    )
    if not res.success:
        raise NumericFailureError(f"likelihood maximization failed: {res.message}")

    theta_star = min(max(math.exp(float(res.x)), theta_min), theta_max)
    ll_star = log_likelihood(ts, theta_star, cfg.delta)
    ll_top = log_likelihood(ts, theta_max, cfg.delta)

    at_boundary = ll_top >= ll_star or theta_max - theta_star <= cfg.tol * theta_max
    if at_boundary:
        logger.warning(
            "likelihood maximum at the upper bound theta_max=%.6g (y_bar=%.6g, n=%d)", theta_max, batch.y_bar, batch.n
        )
        theta_star, ll_star = theta_max, ll_top

    return MlEstimate(
        mean_estimate=1.0 / theta_star,
        theta_star=theta_star,
        at_boundary=at_boundary,
        log_likelihood=ll_star,
    )


def small_noise_ml(y_bar: float, delta: float) -> float:
    """½(ŷ + √(ŷ² − 4δ²)): the ML mean with the Gaussian tail factor dropped."""
    if not (math.isfinite(delta) and delta >= 0):
        raise InvalidParameterError(f"delta must be nonnegative and finite, got {delta}")
    if not math.isfinite(y_bar):
        raise InvalidParameterError(f"y_bar must be finite, got {y_bar}")
    if not y_bar > 0:
        raise DomainError(f"small-noise approximation needs a positive sample mean, got {y_bar}")
    disc = y_bar * y_bar - 4.0 * delta * delta
    if disc < 0:
        raise DomainError(f"small-noise approximation undefined: y_bar^2 < 4 delta^2 ({y_bar}, {delta})")
    return 0.5 * (y_bar + math.sqrt(disc))
