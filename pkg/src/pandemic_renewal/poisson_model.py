"""Exponential interarrival tails and Poisson event counts over a horizon."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = [
    "CountDistribution",
    "check_rate",
    "exp_tail",
    "tail_at_mean_multiples",
    "default_k_max",
    "count_pmf",
    "count_mean",
]


@dataclass(frozen=True)
class CountDistribution:
    """Poisson law truncated at ``k_max``; ``truncation_tail`` is P(count > k_max)."""

    mean: float
    mass: np.ndarray
    truncation_tail: float

    @property
    def k_max(self) -> int:
        return self.mass.size - 1

    def pmf_mean(self) -> float:
        return float(math.fsum(np.arange(self.mass.size) * self.mass))


def check_rate(rate: float) -> float:
    rate = float(rate)
    if not (rate > 0 and math.isfinite(rate)):
        raise ValueError(f"rate must be positive and finite, got {rate!r}")
    return rate


def _check_horizon(t: float, name: str = "horizon") -> float:
    t = float(t)
    if not (t >= 0 and math.isfinite(t)):
        raise ValueError(f"{name} must be non-negative and finite, got {t!r}")
    return t


def exp_tail(rate: float, x: float) -> float:
    """P(X > x) = exp(-rate * x)."""
    rate = check_rate(rate)
    x = _check_horizon(x, "x")
    return math.exp(-rate * x)


def tail_at_mean_multiples(rate: float, k: float) -> float:
    """P(X > k / rate) = exp(-k). ``rate`` is validated but cannot affect the value."""
    check_rate(rate)
    k = float(k)
    if not k >= 0:
        raise ValueError(f"k must be non-negative, got {k!r}")
    return math.exp(-k)


def count_mean(rate: float, horizon: float) -> float:
    return check_rate(rate) * _check_horizon(horizon)


def default_k_max(mean: float) -> int:
    return math.ceil(mean + 12 * math.sqrt(mean)) + 10


def count_pmf(rate: float, horizon: float, k_max: int | None = None) -> CountDistribution:
    """Poisson(rate * horizon) pmf over 0..k_max.

    The mass is anchored in log space at the mode and filled outwards with the
    ratio ``P(k+1) = P(k) * mean / (k + 1)``, so neither factorials nor
    ``exp(-mean)`` can overflow or underflow for large means. The ratios are
    accurate to a few ulps; the anchor is not (lgamma near 1e3 loses ~1e-12),
    so the vector is rescaled once against the exact upper tail.
    """
    mu = count_mean(rate, horizon)
    if k_max is None:
        k_max = default_k_max(mu)
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")

    mass = np.zeros(k_max + 1)
    if mu == 0.0:
        mass[0] = 1.0
        return CountDistribution(mu, mass, 0.0)

    mode = min(int(mu), k_max)
    mass[mode] = math.exp(-mu + mode * math.log(mu) - math.lgamma(mode + 1))
    for k in range(mode, k_max):
        mass[k + 1] = mass[k] * (mu / (k + 1))
    for k in range(mode, 0, -1):
        mass[k - 1] = mass[k] * (k / mu)
    tail = float(stats.poisson.sf(k_max, mu))
    mass *= (1.0 - tail) / math.fsum(mass)
    return CountDistribution(mu, mass, tail)
