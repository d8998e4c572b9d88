"""Seeded random streams and the scalar samplers built on them.

Normals come from numpy's ziggurat ``standard_normal`` on a PCG64 generator;
exponentials use the inverse CDF on an open-interval uniform so the draw is a
documented function of one uniform.
"""
from __future__ import annotations

import logging
import math
import sys

import numpy as np

from memfilter.errors import InvalidParameterError
from memfilter.special import std_normal_cdf

logger = logging.getLogger(__name__)

SEED_LIMIT = 2**64

# Below this acceptance probability the parent-Gaussian rejection sampler is
# replaced by the exponential-proposal tail sampler.
TAIL_SWITCH_PROBABILITY = 0.1

# Smallest value returned by the positive samplers; deeper tail draws underflow.
POSITIVE_FLOOR = sys.float_info.min


class RngStream:
    """Single-owner random stream. Not safe to share across threads or processes."""

    def __init__(self, seed: int) -> None:
        if not 0 <= seed < SEED_LIMIT:
            raise InvalidParameterError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))

    @classmethod
    def for_replicate(cls, master_seed: int, replicate: int) -> RngStream:
        """Derive the stream of one replicate by hashing (master_seed, replicate)."""
        if master_seed < 0 or replicate < 0:
            raise InvalidParameterError("master seed and replicate index must be nonnegative")
        words = np.random.SeedSequence([master_seed, replicate]).generate_state(1, dtype=np.uint64)
        return cls(int(words[0]))

    def uniform_open(self) -> float:
        """Uniform draw on the open interval (0, 1)."""
        while True:
            u = float(self._gen.random())
            if u > 0.0:
                return u

    def standard_normal(self) -> float:
        return float(self._gen.standard_normal())


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value}")


def exponential_from_uniform(u: float, rate: float) -> float:
    """Inverse-CDF transform of a uniform u in (0, 1) to an Exp(rate) variate."""
    if not rate > 0:
        raise InvalidParameterError(f"exponential rate must be positive, got {rate}")
    if not 0.0 < u < 1.0:
        raise InvalidParameterError(f"uniform must lie in (0, 1), got {u}")
    return -math.log(u) / rate


def draw_exponential(stream: RngStream, rate: float) -> float:
    _require_finite("rate", rate)
    return exponential_from_uniform(stream.uniform_open(), rate)


def draw_normal(stream: RngStream, mean: float, sd: float) -> float:
    _require_finite("mean", mean)
    _require_finite("sd", sd)
    if sd < 0:
        raise InvalidParameterError(f"normal sd must be nonnegative, got {sd}")
    if sd == 0:
        return mean
    return mean + sd * stream.standard_normal()


def draw_truncated_normal_positive(stream: RngStream, mean: float, sd: float) -> float:
    """Draw from N(mean, sd²) conditioned on being positive."""
    _require_finite("mean", mean)
    _require_finite("sd", sd)
    if not sd > 0:
        raise InvalidParameterError(f"truncated normal sd must be positive, got {sd}")

    if std_normal_cdf(mean / sd) >= TAIL_SWITCH_PROBABILITY:
        while True:
            x = mean + sd * stream.standard_normal()
            if x > 0:
                return max(x, POSITIVE_FLOOR)

    # Tail sampler: standardized truncation point `lower`, translated exponential
    # proposal with the optimal rate. The excess over `lower` is drawn directly so
    # mean + sd*z never cancels, and the acceptance exponent uses
    # rate - lower = 2/(lower + √(lower² + 4)) so nothing overflows as lower → ∞.
    lower = -mean / sd
    root = lower + math.hypot(lower, 2.0)
    rate = 0.5 * root
    gap = 2.0 / root
    while True:
        excess = exponential_from_uniform(stream.uniform_open(), rate)
        if math.log(stream.uniform_open()) <= -0.5 * (excess - gap) ** 2:
            x = sd * excess
            if x < POSITIVE_FLOOR:
                logger.debug("truncated normal draw underflowed at mean=%g sd=%g", mean, sd)
                return POSITIVE_FLOOR
            return x
