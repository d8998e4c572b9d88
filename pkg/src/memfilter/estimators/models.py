from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

from pydantic import BaseModel, Field, model_validator

from memfilter.errors import InvalidParameterError

PointEstimate = Literal["latent_mean", "inverse_rate_median", "inverse_rate_mean"]


class MemConfig(BaseModel):
    """Prior parameters of the entropic estimator: Γ(n, rate nα) signal, N(0, δ²/n) noise."""

    alpha: float = Field(ge=0, allow_inf_nan=False)
    delta: float = Field(gt=0, allow_inf_nan=False)
    n: int = Field(ge=1)

    model_config = {"frozen": True}


class SampleBatch(BaseModel):
    values: list[float] = Field(min_length=1)
    y_bar: float = 0.0

    model_config = {"frozen": True}

    @model_validator(mode="before")
    @classmethod
    def _fill_mean(cls, data: object) -> object:
        if isinstance(data, dict) and "y_bar" not in data and data.get("values"):
            values = [float(v) for v in data["values"]]
            data = {**data, "y_bar": math.fsum(values) / len(values)}
        return data

    @model_validator(mode="after")
    def _check_mean(self) -> SampleBatch:
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("sample values must be finite")
        mean = math.fsum(self.values) / len(self.values)
        if abs(self.y_bar - mean) > 4 * math.ulp(max(abs(mean), 1.0)):
            raise ValueError(f"y_bar {self.y_bar} does not match the sample mean {mean}")
        return self

    @classmethod
    def from_values(cls, values: list[float]) -> SampleBatch:
        return cls(values=list(values))

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True, slots=True)
class EstimateResult:
    """Dual minimizer and the signal/noise split it induces: ŷ = x̂* + ê*."""

    lambda_star: float
    x_hat_star: float
    e_hat_star: float


class GibbsConfig(BaseModel):
    burn_in: int = Field(default=500, ge=0)
    n_draws: int = Field(default=2000, ge=1)
    delta: float = Field(gt=0, allow_inf_nan=False)
    n: int = Field(ge=1)
    point_estimate: PointEstimate = "latent_mean"

    model_config = {"frozen": True}


@dataclass(frozen=True, slots=True)
class GibbsState:
    x: float
    theta: float

    def __post_init__(self) -> None:
        if not (self.x > 0 and self.theta > 0):
            raise InvalidParameterError(f"Gibbs state must be positive, got x={self.x}, theta={self.theta}")


@dataclass(frozen=True)
class PosteriorSummary:
    """Retained draws of E(x) = 1/θ and of the latent mean x, with their moments."""

    draws_of_Ex: list[float]
    mean: float
    sd: float
    draws_of_x: list[float] = field(default_factory=list)
    x_mean: float = math.nan
    x_sd: float = math.nan
    point_estimate: float = math.nan
    # Retained draws where the latent mean underflowed to the smallest positive float.
    floored_draws: int = 0


class MleConfig(BaseModel):
    """Search interval and tolerance for the likelihood maximization.

    Unset bounds are scale-adapted to the sample: [1e-3/ŷ, 1e3/ŷ].
    """

    theta_min: float | None = Field(default=None, gt=0)
    theta_max: float | None = Field(default=None, gt=0)
    tol: float = Field(default=1e-8, gt=0)
    delta: float = Field(gt=0, allow_inf_nan=False)
    min_scale: float = Field(default=1e-3, gt=0)
    max_scale: float = Field(default=1e3, gt=0)

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check_interval(self) -> MleConfig:
        if self.theta_min is not None and self.theta_max is not None and not self.theta_min < self.theta_max:
            raise ValueError(f"theta_min {self.theta_min} must be below theta_max {self.theta_max}")
        if not self.min_scale < self.max_scale:
            raise ValueError("min_scale must be below max_scale")
        return self

    def bounds(self, y_bar: float) -> tuple[float, float]:
        if self.theta_min is not None and self.theta_max is not None:
            return self.theta_min, self.theta_max
        if not y_bar > 0:
            raise InvalidParameterError(
                f"scale-adapted theta bounds need a positive sample mean, got {y_bar}; pass theta_min/theta_max"
            )
        lo = self.theta_min if self.theta_min is not None else self.min_scale / y_bar
        hi = self.theta_max if self.theta_max is not None else self.max_scale / y_bar
        if not lo < hi:
            raise InvalidParameterError(f"empty theta interval [{lo}, {hi}]")
        return lo, hi


@dataclass(frozen=True, slots=True)
class MlEstimate:
    mean_estimate: float
    theta_star: float
    at_boundary: bool
    log_likelihood: float
