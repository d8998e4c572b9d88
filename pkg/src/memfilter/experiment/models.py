from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, Field, model_validator

from memfilter import config

Method = Literal["mem", "bayes", "ml"]


class SimConfig(BaseModel):
    """One Monte Carlo study: truncated noisy exponential data, n points per replicate."""

    theta_true: float = Field(default=config.THETA_TRUE, gt=0, allow_inf_nan=False)
    delta: float = Field(default=config.DELTA, gt=0, allow_inf_nan=False)
    n: int = Field(default=config.SAMPLE_SIZE, ge=1)
    replicates: int = Field(default=config.REPLICATES, ge=1)
    master_seed: int = Field(default=config.MASTER_SEED, ge=0, lt=2**64)
    alpha_mem: float = Field(default=config.ALPHA_MEM, ge=0, allow_inf_nan=False)
    histogram_bins: int = Field(default=config.HISTOGRAM_BINS, ge=1)
    histogram_range: tuple[float, float] = config.HISTOGRAM_RANGE

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check_range(self) -> SimConfig:
        lo, hi = self.histogram_range
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"histogram range must satisfy lo < hi, got {self.histogram_range}")
        return self


class ReplicateEstimates(BaseModel):
    replicate: int
    y_bar: float
    mem: float | None = None
    bayes: float | None = None
    ml: float | None = None
    ml_boundary: bool | None = None


class MethodSummary(BaseModel):
    mean: float
    sd: float
    count: int
    boundary_count: int = 0


class HistogramBin(BaseModel):
    bin_lo: float
    bin_hi: float
    count: int


class Histogram(BaseModel):
    bins: list[HistogramBin]
    clamped_below: int = 0
    clamped_above: int = 0

    @property
    def total(self) -> int:
        return sum(b.count for b in self.bins)


class ExperimentReport(BaseModel):
    config: SimConfig
    methods: list[Method]
    per_replicate: list[ReplicateEstimates]
    summary: dict[str, MethodSummary]
    histograms: dict[str, Histogram]

    def values(self, method: Method) -> list[float]:
        return [getattr(r, method) for r in self.per_replicate if getattr(r, method) is not None]


class AlphaSweepEntry(BaseModel):
    """MEM estimates of one study repeated at a fixed α."""

    alpha: float
    summary: MethodSummary
    histogram: Histogram
