"""Maximum entropy in the mean for ŷ = x̂ + ê with x̂ ≥ 0.

Priors: X ~ Gamma(shape n, rate nα) (mean 1/α) and V ~ N(0, δ²/n). Their joint
log partition function is

    ln Z(λ) = λ²δ²/2n − n ln(λ/(nα) + 1),   λ > −nα,

and the estimator comes from the minimizer λ* of the convex dual
Σ(λ) = ln Z(λ) + λŷ. The filtered estimate and residual are the tilted means
x̂* = n/(λ* + nα) and ê* = −δ²λ*/n.

At the minimizer x̂* is the positive root of x² − (ŷ − αδ²)x − δ² = 0, which is
how the closed form is evaluated (without cancellation on either sign of
ŷ − αδ²). α = 0 reduces to x̂* = ½(ŷ + √(ŷ² + 4δ²)).
"""
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence

from scipy.optimize import brentq

from memfilter.errors import BracketingError, DomainError, InvalidParameterError, NumericFailureError
from memfilter.estimators.models import EstimateResult, MemConfig, SampleBatch

logger = logging.getLogger(__name__)

GRADIENT_TOL = 1e-12
MAX_NEWTON_ITERATIONS = 200
FIXED_POINT_TOL = 1e-10


def _check_dual_domain(lam: float, cfg: MemConfig) -> None:
    if cfg.alpha == 0:
        raise DomainError("the dual entropy is undefined at alpha=0; use mem_closed_form")
    if not math.isfinite(lam):
        raise InvalidParameterError(f"lambda must be finite, got {lam}")
    if not lam > -cfg.n * cfg.alpha:
        raise DomainError(f"lambda={lam} is outside the dual domain (-{cfg.n * cfg.alpha}, inf)")


def log_partition(lam: float, cfg: MemConfig) -> float:
    _check_dual_domain(lam, cfg)
    return lam * lam * cfg.delta**2 / (2 * cfg.n) - cfg.n * math.log1p(lam / (cfg.n * cfg.alpha))


def dual_entropy(lam: float, y_bar: float, cfg: MemConfig) -> float:
    """Σ(λ) = λ²δ²/2n − n ln(λ/(nα) + 1) + λŷ."""
    return log_partition(lam, cfg) + lam * y_bar


def dual_gradient(lam: float, y_bar: float, cfg: MemConfig) -> float:
    """Σ'(λ) = λδ²/n − (1/α)/(λ/(nα) + 1) + ŷ."""
    _check_dual_domain(lam, cfg)
    return lam * cfg.delta**2 / cfg.n - cfg.n / (lam + cfg.n * cfg.alpha) + y_bar


def tilted_means(lam: float, cfg: MemConfig) -> tuple[float, float]:
    """(E[X], E[V]) under the tilted measure dP_λ; they sum to ŷ only at λ*."""
    _check_dual_domain(lam, cfg)
    return cfg.n / (lam + cfg.n * cfg.alpha), -cfg.delta**2 * lam / cfg.n


def _require_finite_mean(y_bar: float) -> None:
    if not math.isfinite(y_bar):
        raise InvalidParameterError(f"y_bar must be finite, got {y_bar}")


def _positive_root(shift: float, delta: float) -> float:
    """Positive root of x² − shift·x − δ² = 0."""
    root = math.hypot(shift, 2.0 * delta)
    if shift >= 0:
        return 0.5 * (shift + root)
    return 2.0 * delta * delta / (root - shift)


def mem_closed_form(y_bar: float, cfg: MemConfig) -> EstimateResult:
    _require_finite_mean(y_bar)
    d2 = cfg.delta**2
    n = cfg.n

    if cfg.alpha == 0:
        root = math.hypot(y_bar, 2.0 * cfg.delta)
        x_hat = _positive_root(y_bar, cfg.delta)
        e_hat = 0.5 * (y_bar - root) if y_bar <= 0 else -2.0 * d2 / (root + y_bar)
        return EstimateResult(lambda_star=-n * e_hat / d2, x_hat_star=x_hat, e_hat_star=e_hat)

    alpha = cfg.alpha
    shift = y_bar - alpha * d2
    x_hat = _positive_root(shift, cfg.delta)

    # λ*/n = 1/x̂* − α, rearranged so the sign of 1 − αŷ is exact.
    root = math.hypot(shift, 2.0 * cfg.delta)
    pivot = y_bar + alpha * d2
    if pivot > 0:
        lam_per_n = 2.0 * (1.0 - alpha * y_bar) / (root + pivot)
    else:
        lam_per_n = (root - pivot) / (2.0 * d2)
    return EstimateResult(lambda_star=n * lam_per_n, x_hat_star=x_hat, e_hat_star=-d2 * lam_per_n)


def minimize_dual_numeric(y_bar: float, cfg: MemConfig) -> EstimateResult:
    """Minimize Σ by safeguarded Newton on its gradient.

    The iteration runs on the Gamma tilt rate κ = λ + nα ∈ (0, ∞), which keeps
    x̂* = n/κ accurate when λ* sits close to the pole at −nα. A Newton step that
    leaves the current bracket is replaced by bisection.
    """
    if not cfg.alpha > 0:
        raise DomainError("numeric dual minimization needs alpha > 0")
    _require_finite_mean(y_bar)

    n = cfg.n
    n_alpha = n * cfg.alpha
    slope = cfg.delta**2 / n
    tol = GRADIENT_TOL * max(1.0, abs(y_bar))

    def gradient(kappa: float) -> float:
        return (kappa - n_alpha) * slope - n / kappa + y_bar

    lo, hi = 0.0, math.inf
    kappa = n_alpha
    for iteration in range(1, MAX_NEWTON_ITERATIONS + 1):
        g = gradient(kappa)
        if abs(g) <= tol:
            break
        if g < 0:
            lo = kappa
        else:
            hi = kappa

        candidate = kappa - g / (slope + n / (kappa * kappa))
        if not lo < candidate < hi:
            candidate = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * kappa
            logger.debug("Newton step left (%g, %g); bisecting to %g", lo, hi, candidate)
        if candidate == kappa or (math.isfinite(hi) and hi - lo <= 4 * math.ulp(hi)):
            logger.debug("dual gradient %.3g at rounding floor after %d iterations", g, iteration)
            break
        kappa = candidate
    else:
        raise NumericFailureError(
            f"dual minimization did not converge in {MAX_NEWTON_ITERATIONS} iterations "
            f"(y_bar={y_bar}, alpha={cfg.alpha}, delta={cfg.delta}, n={n})"
        )

    lam = kappa - n_alpha
    return EstimateResult(lambda_star=lam, x_hat_star=n / kappa, e_hat_star=-slope * lam)


def max_entropy_value(y_bar: float, cfg: MemConfig) -> float:
    """Σ(λ*), the optimal dual value."""
    result = mem_closed_form(y_bar, cfg)
    return dual_entropy(result.lambda_star, y_bar, cfg)


def mem_per_observation(batch: SampleBatch, cfg: MemConfig) -> list[EstimateResult]:
    """Filter every measurement on its own (one n = 1 problem per y_i)."""
    single = cfg.model_copy(update={"n": 1})
    return [mem_closed_form(y, single) for y in batch.values]


def asymptotic_x_tilde(alpha: float, theta: float, delta: float) -> float:
    """Large-sample limit of x̂*: the closed form with ŷ replaced by θ (n drops out)."""
    if not theta > 0:
        raise InvalidParameterError(f"theta must be positive, got {theta}")
    return mem_closed_form(theta, MemConfig(alpha=alpha, delta=delta, n=1)).x_hat_star


def solve_alpha_fixed_point(
    bracket: tuple[float, float],
    delta: float,
    x_tilde: Callable[[float, float], float],
) -> float:
    """Root α* of x̃(α) − 1/α on the bracket; 1/α* recovers the exponential mean."""
    lo, hi = bracket
    if not 0 < lo < hi:
        raise BracketingError(f"bracket must satisfy 0 < lo < hi, got {bracket}")

    def residual(alpha: float) -> float:
        return x_tilde(alpha, delta) - 1.0 / alpha

    f_lo, f_hi = residual(lo), residual(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise BracketingError(f"x_tilde(alpha) - 1/alpha keeps its sign on {bracket} ({f_lo:.3g}, {f_hi:.3g})")

    alpha_star = brentq(residual, lo, hi, xtol=1e-15, rtol=4 * 2.220446049250313e-16, maxiter=200)
    remaining = abs(residual(alpha_star))
    if remaining > FIXED_POINT_TOL:
        logger.warning("fixed point residual %.3g above %.0e at alpha=%.17g", remaining, FIXED_POINT_TOL, alpha_star)
    return alpha_star


def self_consistent_alpha(y_bar: float, delta: float) -> float:
    """Solve x̂*(α) = 1/α for a finite sample; the root is α = 1/ŷ."""
    if not y_bar > 0:
        raise InvalidParameterError(f"self-consistent alpha needs a positive sample mean, got {y_bar}")
    return solve_alpha_fixed_point(
        (1e-2 / y_bar, 1e2 / y_bar),
        delta,
        lambda alpha, d: mem_closed_form(y_bar, MemConfig(alpha=alpha, delta=d, n=1)).x_hat_star,
    )


def alpha_profile(y_bar: float, delta: float, n: int, alphas: Sequence[float]) -> list[tuple[float, EstimateResult]]:
    if any(b < a for a, b in zip(alphas, alphas[1:])):
        raise InvalidParameterError("alpha grid must be sorted ascending")
    return [(alpha, mem_closed_form(y_bar, MemConfig(alpha=alpha, delta=delta, n=n))) for alpha in alphas]


def residual_vs_alpha_profile(y_bar: float, delta: float, n: int, alphas: Sequence[float]) -> list[tuple[float, float]]:
    """ê*(α) on an ascending grid; nondecreasing in α."""
    return [(alpha, result.e_hat_star) for alpha, result in alpha_profile(y_bar, delta, n, alphas)]
