from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from memfilter.errors import InvalidParameterError
from memfilter.experiment.models import Histogram, HistogramBin


def summarize(values: Sequence[float]) -> tuple[float, float]:
    """Sample mean and sample sd (n − 1 divisor); a single value has sd 0."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise InvalidParameterError("cannot summarize an empty sample")
    mean = float(np.mean(arr))
    if arr.size == 1:
        return mean, 0.0
    return mean, float(np.std(arr, ddof=1))


def histogram(values: Sequence[float], bins: int, value_range: tuple[float, float]) -> Histogram:
    """Equal-width bins over [lo, hi); out-of-range values clamp to the end bins."""
    lo, hi = value_range
    if not lo < hi:
        raise InvalidParameterError(f"histogram range must satisfy lo < hi, got {value_range}")
    if bins < 1:
        raise InvalidParameterError(f"histogram needs at least one bin, got {bins}")

    arr = np.asarray(values, dtype=float)
    edges = np.linspace(lo, hi, bins + 1)
    idx = np.searchsorted(edges, arr, side="right") - 1
    below = int(np.count_nonzero(arr < lo))
    above = int(np.count_nonzero(arr >= hi))
    counts = np.bincount(np.clip(idx, 0, bins - 1), minlength=bins)

    return Histogram(
        bins=[
            HistogramBin(bin_lo=float(edges[i]), bin_hi=float(edges[i + 1]), count=int(counts[i]))
            for i in range(bins)
        ],
        clamped_below=below,
        clamped_above=above,
    )
