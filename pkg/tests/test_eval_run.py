from __future__ import annotations

import json

import pytest

from memfilter import config
from memfilter.eval_run import TARGETS_PATH, build_dataset, study_configs, summarize_report
from memfilter.experiment.models import MethodSummary


def _targets() -> dict:
    return json.loads(TARGETS_PATH.read_text())


def test_targets_cover_every_method():
    assert set(_targets()["methods"]) == {"mem", "bayes", "ml"}


def test_band_centres_pass_and_outliers_fail():
    targets = _targets()

    def centred(method: str) -> MethodSummary:
        spec = targets["methods"][method]
        return MethodSummary(mean=sum(spec["mean_band"]) / 2, sd=sum(spec["sd_band"]) / 2, count=1000)

    report = build_dataset(targets).evaluate_sync(centred, max_concurrency=1)
    summary = summarize_report(report, seed=1)
    assert summary["all_passed"]
    assert set(summary["passed"]) == {"mem", "bayes", "ml"}

    def off(method: str) -> MethodSummary:
        return MethodSummary(mean=10.0, sd=10.0, count=1000)

    report = build_dataset(targets).evaluate_sync(off, max_concurrency=1)
    assert not summarize_report(report, seed=1)["all_passed"]


def test_study_configs_follow_env_settings(monkeypatch):
    monkeypatch.setattr(config, "THETA_MIN_SCALE", 0.01)
    monkeypatch.setattr(config, "THETA_MAX_SCALE", 50.0)
    monkeypatch.setattr(config, "N_DRAWS", 300)
    cfg, gibbs_cfg, mle_cfg = study_configs(_targets(), seed=9)
    assert cfg.master_seed == 9
    assert gibbs_cfg.n_draws == 300
    assert (gibbs_cfg.delta, gibbs_cfg.n) == (cfg.delta, cfg.n)
    assert mle_cfg.delta == cfg.delta
    assert mle_cfg.bounds(2.0) == pytest.approx((0.005, 25.0), rel=1e-15)
