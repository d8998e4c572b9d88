from __future__ import annotations

import math
import sys

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from memfilter.errors import InvalidParameterError
from memfilter.estimators.bayes import gibbs_step, run_chain
from memfilter.estimators.models import GibbsConfig, GibbsState, SampleBatch
from memfilter.experiment.harness import simulate_batch
from memfilter.sampling.rng import POSITIVE_FLOOR, RngStream

BATCH = SampleBatch.from_values([0.4, 1.2, 1.4])


def _cfg(**overrides) -> GibbsConfig:
    base = {"burn_in": 100, "n_draws": 500, "delta": 0.5, "n": 3}
    return GibbsConfig(**(base | overrides))


class TestGibbsStep:
    def test_state_stays_positive(self):
        stream = RngStream(3)
        state = GibbsState(x=1.0, theta=1.0)
        for _ in range(2000):
            state = gibbs_step(state, 1.0, _cfg(), stream)
            assert state.x > 0 and state.theta > 0

    def test_negligible_noise_pins_latent_mean(self):
        stream = RngStream(4)
        cfg = _cfg(delta=1e-8)
        state = GibbsState(x=1.0, theta=1.0)
        for _ in range(200):
            state = gibbs_step(state, 1.3, cfg, stream)
            assert state.x == pytest.approx(1.3, abs=1e-6)

    def test_latent_conditional_at_fixed_rate(self):
        # With θ held at 1 the x-draw is N(1 − 1/12, 1/12) restricted to x > 0.
        stream = RngStream(5)
        fixed = GibbsState(x=1.0, theta=1.0)
        draws = np.array([gibbs_step(fixed, 1.0, _cfg(), stream).x for _ in range(100_000)])
        mean, sd = 1.0 - 1.0 / 12.0, math.sqrt(1.0 / 12.0)
        target = stats.truncnorm(a=-mean / sd, b=np.inf, loc=mean, scale=sd)
        assert draws.mean() == pytest.approx(target.mean(), abs=0.005)
        assert stats.kstest(draws, target.cdf).pvalue > 1e-3

    @pytest.mark.parametrize(("delta", "n"), [(0.5, 3), (10.0, 1)])
    def test_extreme_state_stays_finite(self, delta, n):
        # Latent mean at the smallest positive float and θ at the largest finite float.
        stream = RngStream(6)
        state = GibbsState(x=sys.float_info.min, theta=sys.float_info.max)
        for _ in range(200):
            state = gibbs_step(state, 1.0, _cfg(delta=delta, n=n), stream)
            assert POSITIVE_FLOOR <= state.x < math.inf
            assert 0 < state.theta <= sys.float_info.max

    def test_invalid_state_rejected(self):
        with pytest.raises(InvalidParameterError):
            GibbsState(x=0.0, theta=1.0)


class TestRunChain:
    def test_deterministic_per_seed(self):
        a = run_chain(BATCH, _cfg(), RngStream(10))
        b = run_chain(BATCH, _cfg(), RngStream(10))
        assert a == b

    def test_summary_recomputable_from_draws(self):
        summary = run_chain(BATCH, _cfg(), RngStream(11))
        draws = np.array(summary.draws_of_Ex)
        assert len(draws) == 500
        assert np.all(draws > 0)
        assert summary.mean == pytest.approx(draws.mean(), abs=1e-12)
        assert summary.sd == pytest.approx(draws.std(ddof=1), abs=1e-12)
        latent = np.array(summary.draws_of_x)
        assert np.all(latent > 0)
        assert summary.x_mean == pytest.approx(latent.mean(), abs=1e-12)
        assert summary.x_sd == pytest.approx(latent.std(ddof=1), abs=1e-12)

    def test_default_point_estimate_is_latent_mean(self):
        summary = run_chain(BATCH, _cfg(), RngStream(12))
        assert summary.point_estimate == summary.x_mean

    def test_selectable_point_estimates(self):
        median = run_chain(BATCH, _cfg(point_estimate="inverse_rate_median"), RngStream(12))
        assert median.point_estimate == pytest.approx(float(np.median(median.draws_of_Ex)), rel=1e-15)
        mean = run_chain(BATCH, _cfg(point_estimate="inverse_rate_mean"), RngStream(12))
        assert mean.point_estimate == mean.mean

    def test_single_draw_has_zero_sd(self):
        summary = run_chain(BATCH, _cfg(n_draws=1), RngStream(13))
        assert summary.sd == 0.0
        assert len(summary.draws_of_Ex) == 1

    def test_negligible_noise_rate_posterior(self):
        # x stays at ŷ, so θ ~ Exp(rate ŷ) and the median of 1/θ is ŷ/ln 2.
        batch = SampleBatch.from_values([0.8, 1.0, 1.2])
        summary = run_chain(batch, _cfg(delta=1e-8, n_draws=20_000), RngStream(14))
        assert float(np.median(summary.draws_of_Ex)) == pytest.approx(1.0 / math.log(2.0), rel=0.05)
        assert summary.x_mean == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("replicate", [1, 8])
    def test_long_default_study_chain_completes(self, replicate):
        # These replicates wander toward x → 0 within 50k steps.
        stream = RngStream.for_replicate(20240101, replicate)
        batch = simulate_batch(1.0, 0.5, 3, stream)
        summary = run_chain(batch, _cfg(burn_in=500, n_draws=50_000), stream)
        draws = np.array(summary.draws_of_Ex)
        latent = np.array(summary.draws_of_x)
        assert len(draws) == 50_000
        assert np.all(np.isfinite(draws)) and np.all(draws > 0)
        assert np.all(latent >= POSITIVE_FLOOR)
        assert summary.floored_draws == int(np.count_nonzero(latent == POSITIVE_FLOOR))
        assert math.isfinite(summary.x_mean)

    def test_sample_size_mismatch(self):
        with pytest.raises(InvalidParameterError):
            run_chain(BATCH, _cfg(n=4), RngStream(0))

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            _cfg(n_draws=0)
        with pytest.raises(ValidationError):
            _cfg(point_estimate="mode")
