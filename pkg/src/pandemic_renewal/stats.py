"""Interarrival estimation from historical event years."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.special import ndtri

__all__ = [
    "InterarrivalSample",
    "EstimateResult",
    "METHODS",
    "intervals_from_years",
    "mean_interarrival",
    "normal_quantile",
    "ci_from_summary",
    "ci_mean",
]

#: "exponential" takes sigma = mean (exponential law has sd equal to its mean);
#: "sample-sd" is the usual normal interval with the sample standard deviation.
METHODS = ("exponential", "sample-sd")


@dataclass(frozen=True)
class InterarrivalSample:
    gaps: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "gaps", tuple(self.gaps))
        for g in self.gaps:
            if not g > 0:
                raise ValueError(f"interarrival gaps must be positive, got {g!r}")

    @property
    def n(self) -> int:
        return len(self.gaps)


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    ci_low: float
    ci_high: float
    confidence: float
    method: str
    n: int


def intervals_from_years(years: Sequence[int]) -> InterarrivalSample:
    """Differences between consecutive event years.

    Plain differences: 1889 -> 1900 is an 11-year gap.
    """
    years = list(years)
    if len(years) < 2:
        raise ValueError("need at least two event years to form a gap")
    for i, (a, b) in enumerate(zip(years, years[1:]), start=1):
        if b <= a:
            raise ValueError(f"years must be strictly increasing: {a} then {b} at position {i}")
    return InterarrivalSample(tuple(b - a for a, b in zip(years, years[1:])))


def mean_interarrival(sample: InterarrivalSample) -> float:
    if sample.n == 0:
        raise ValueError("empty sample")
    return math.fsum(sample.gaps) / sample.n


def normal_quantile(p: float) -> float:
    """Standard normal quantile (inverse CDF)."""
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    return float(ndtri(p))


def ci_from_summary(
    mean: float,
    n: int,
    confidence: float = 0.90,
    sd: float | None = None,
    method: str = "exponential",
) -> EstimateResult:
    """Normal-approximation interval ``mean +/- z * sd / sqrt(n)``.

    With ``sd=None`` the exponential assumption sd = mean is used. The lower
    bound is clamped at 0.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 gaps for an interval, got {n}")
    if not 0 < confidence < 1:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence!r}")
    if not (mean > 0 and math.isfinite(mean)):
        raise ValueError(f"mean must be positive and finite, got {mean!r}")
    if sd is None:
        sd = mean
    z = normal_quantile((1 + confidence) / 2)
    half = z * sd / math.sqrt(n)
    return EstimateResult(
        mean=mean,
        ci_low=max(0.0, mean - half),
        ci_high=mean + half,
        confidence=confidence,
        method=method,
        n=n,
    )


def ci_mean(
    sample: InterarrivalSample, confidence: float = 0.90, method: str = "exponential"
) -> EstimateResult:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if sample.n < 2:
        raise ValueError(f"need n >= 2 gaps for an interval, got {sample.n}")
    mean = mean_interarrival(sample)
    if method == "exponential":
        sd = mean
    else:
        sd = math.sqrt(math.fsum((g - mean) ** 2 for g in sample.gaps) / (sample.n - 1))
    return ci_from_summary(mean, sample.n, confidence, sd=sd, method=method)
