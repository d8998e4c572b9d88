from __future__ import annotations

import math
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from memfilter.errors import InvalidParameterError
from memfilter.sampling.rng import (
    POSITIVE_FLOOR,
    RngStream,
    draw_exponential,
    draw_normal,
    draw_truncated_normal_positive,
    exponential_from_uniform,
)
from memfilter.special import std_normal_cdf, std_normal_pdf


class TestRngStream:
    @pytest.mark.parametrize("seed", [-1, 2**64])
    def test_rejects_seed_outside_u64(self, seed):
        with pytest.raises(InvalidParameterError):
            RngStream(seed)

    def test_equal_seeds_give_equal_sequences(self):
        a, b = RngStream(42), RngStream(42)
        assert [a.standard_normal() for _ in range(50)] == [b.standard_normal() for _ in range(50)]

    def test_replicate_streams_are_stable_and_distinct(self):
        first = [RngStream.for_replicate(7, r).uniform_open() for r in range(20)]
        again = [RngStream.for_replicate(7, r).uniform_open() for r in range(20)]
        assert first == again
        assert len(set(first)) == 20

    def test_replicate_stream_independent_of_other_replicates(self):
        alone = RngStream.for_replicate(3, 5)
        _ = [RngStream.for_replicate(3, r).uniform_open() for r in range(5)]
        after = RngStream.for_replicate(3, 5)
        assert alone.seed == after.seed

    def test_uniform_open_is_inside_unit_interval(self):
        s = RngStream(1)
        assert all(0.0 < s.uniform_open() < 1.0 for _ in range(1000))


class TestExponential:
    def test_inverse_cdf_identity(self):
        assert exponential_from_uniform(math.exp(-1), 1.0) == pytest.approx(1.0, rel=1e-15)
        assert exponential_from_uniform(math.exp(-1), 2.0) == pytest.approx(0.5, rel=1e-15)

    @pytest.mark.parametrize("rate", [0.0, -1.0])
    def test_rejects_nonpositive_rate(self, rate):
        with pytest.raises(InvalidParameterError):
            draw_exponential(RngStream(0), rate)

    def test_rejects_uniform_outside_open_interval(self):
        with pytest.raises(InvalidParameterError):
            exponential_from_uniform(0.0, 1.0)

    def test_ks(self):
        s = RngStream(11)
        draws = np.array([draw_exponential(s, 1.0) for _ in range(100_000)])
        assert stats.kstest(draws, stats.expon().cdf).pvalue > 1e-3

    @pytest.mark.slow
    def test_mean_over_million_draws(self):
        s = RngStream(11)
        draws = np.array([draw_exponential(s, 1.0) for _ in range(1_000_000)])
        assert draws.mean() == pytest.approx(1.0, abs=0.005)


class TestNormal:
    def test_zero_sd_returns_mean(self):
        assert draw_normal(RngStream(0), 3.0, 0.0) == 3.0

    def test_negative_sd_rejected(self):
        with pytest.raises(InvalidParameterError):
            draw_normal(RngStream(0), 0.0, -0.1)

    def test_ks(self):
        s = RngStream(5)
        draws = np.array([draw_normal(s, 0.0, 0.5) for _ in range(100_000)])
        assert stats.kstest(draws, stats.norm(0.0, 0.5).cdf).pvalue > 1e-3

    @pytest.mark.slow
    def test_moments_over_million_draws(self):
        s = RngStream(5)
        draws = np.array([draw_normal(s, 0.0, 0.5) for _ in range(1_000_000)])
        assert draws.mean() == pytest.approx(0.0, abs=0.002)
        assert draws.std(ddof=1) == pytest.approx(0.5, abs=0.002)


def _truncated_mean(mean: float, sd: float) -> float:
    a = mean / sd
    return mean + sd * std_normal_pdf(a) / std_normal_cdf(a)


class TestTruncatedNormal:
    @pytest.mark.parametrize(("mean", "sd"), [(5.0, 0.1), (0.3, 0.2), (-2.0, 1.0), (-2.0, 0.3), (-50.0, 1.0)])
    def test_always_positive(self, mean, sd):
        s = RngStream(9)
        assert all(draw_truncated_normal_positive(s, mean, sd) > 0 for _ in range(2000))

    def test_negligible_truncation_keeps_mean(self):
        s = RngStream(2)
        draws = np.array([draw_truncated_normal_positive(s, 5.0, 0.1) for _ in range(20_000)])
        assert draws.mean() == pytest.approx(5.0, abs=0.01)

    @pytest.mark.parametrize(("mean", "sd"), [(0.3, 0.2), (-2.0, 1.0), (-2.0, 0.3)])
    def test_matches_truncated_normal(self, mean, sd):
        s = RngStream(17)
        draws = np.array([draw_truncated_normal_positive(s, mean, sd) for _ in range(50_000)])
        target = stats.truncnorm(a=-mean / sd, b=np.inf, loc=mean, scale=sd)
        assert draws.mean() == pytest.approx(_truncated_mean(mean, sd), rel=0.02)
        assert stats.kstest(draws, target.cdf).pvalue > 1e-3

    def test_far_tail_terminates_with_small_excess(self):
        # Truncation point 50 sd above the mean: the draw is the excess, about sd/50.
        s = RngStream(23)
        draws = np.array([draw_truncated_normal_positive(s, -50.0, 1.0) for _ in range(2000)])
        assert np.all(np.isfinite(draws))
        assert 0.015 < draws.mean() < 0.025

    @pytest.mark.parametrize("mean", [-1e100, -1e160, -1e300])
    def test_extreme_tail_draws_scale_as_variance_over_mean(self, mean):
        # Excess ~ Exp(rate ≈ |mean|/sd), so x = sd·excess has mean sd²/|mean|.
        sd = 0.3
        s = RngStream(29)
        draws = np.array([draw_truncated_normal_positive(s, mean, sd) for _ in range(2000)])
        assert np.all(draws > 0)
        assert (draws * (-mean / sd**2)).mean() == pytest.approx(1.0, rel=0.1)

    def test_truncation_point_beyond_float_range_returns_floor(self):
        # -mean/sd overflows to inf.
        s = RngStream(31)
        assert draw_truncated_normal_positive(s, -1e308, 1e-3) == POSITIVE_FLOOR
        assert draw_truncated_normal_positive(s, -sys.float_info.max, 0.5) == POSITIVE_FLOOR

    def test_rejects_nonpositive_sd(self):
        with pytest.raises(InvalidParameterError):
            draw_truncated_normal_positive(RngStream(0), 1.0, 0.0)


def test_sampling_layer_does_not_load_estimators():
    code = "import sys, memfilter.sampling.rng; print('memfilter.estimators' in sys.modules)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
