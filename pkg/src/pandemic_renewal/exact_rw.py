"""Exact and asymptotic return-to-origin laws of the simple symmetric random walk.

Two numeric tiers are exposed side by side:

* ``*_exact`` functions return :class:`fractions.Fraction` values built from
  big-integer binomials. They work for any epoch but are meant as the oracle
  tier (``2n <= EXACT_THRESHOLD`` is what the float tier delegates to them).
* the plain functions return floats. Above the threshold, ``u_2n`` is
  evaluated in log space through a Stirling expansion of
  ``log Gamma(n + 1/2) - log Gamma(n + 1)`` written so the large terms
  cancel analytically, which keeps relative error near 1e-15 for any ``n``.

Every return-related quantity lives on even epochs; odd epochs raise
:class:`OddEpochError` instead of being silently rounded (see
:func:`floor_even` for the explicit convenience).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "EXACT_THRESHOLD",
    "OddEpochError",
    "ReturnCountPmf",
    "LastZeroPmf",
    "floor_even",
    "log_at_origin_prob",
    "at_origin_prob",
    "at_origin_prob_exact",
    "no_return_survival",
    "no_return_survival_exact",
    "no_return_survival_asymptotic",
    "first_return_pmf",
    "first_return_pmf_exact",
    "return_count_pmf",
    "return_count_pmf_exact",
    "expected_returns",
    "expected_returns_by_sum",
    "expected_returns_exact",
    "last_zero_pmf",
    "last_zero_pmf_exact",
    "last_zero_cdf",
    "last_zero_cdf_exact",
]

#: Largest epoch (2n) served by the big-integer rational tier in the float API.
EXACT_THRESHOLD = 64

# B_2k / (2k (2k - 1)) for k = 1..8
_STIRLING = (
    1 / 12,
    -1 / 360,
    1 / 1260,
    -1 / 1680,
    1 / 1188,
    -691 / 360360,
    1 / 156,
    -3617 / 122400,
)
_HALF_LOG_PI = 0.5 * math.log(math.pi)


class OddEpochError(ValueError):
    """An odd (or otherwise invalid) epoch was passed where returns live on even epochs."""


@dataclass(frozen=True)
class ReturnCountPmf:
    """Law of the number of returns to 0 within ``horizon`` steps; ``mass[r]`` for r = 0..n."""

    horizon: int
    mass: np.ndarray

    def mean(self) -> float:
        return float(np.dot(np.arange(self.mass.size), self.mass))


@dataclass(frozen=True)
class LastZeroPmf:
    """Law of the last visit to 0 up to ``horizon``; ``mass[k]`` is the mass at epoch 2k."""

    horizon: int
    mass: np.ndarray

    @property
    def epochs(self) -> np.ndarray:
        return np.arange(0, self.horizon + 1, 2)

    def cdf(self, epoch: int) -> float:
        k = _check_even(epoch, "epoch") // 2
        if epoch > self.horizon:
            raise ValueError(f"epoch {epoch} exceeds horizon {self.horizon}")
        return float(math.fsum(self.mass[: k + 1]))


def floor_even(n: int) -> int:
    """Largest even integer <= ``n`` (for callers that opt into rounding)."""
    return int(math.floor(n)) & ~1


def _check_even(epoch: int, name: str = "epoch", minimum: int = 0) -> int:
    if isinstance(epoch, bool) or int(epoch) != epoch:
        raise OddEpochError(f"{name} must be an integer, got {epoch!r}")
    epoch = int(epoch)
    if epoch < minimum:
        raise OddEpochError(f"{name} must be >= {minimum}, got {epoch}")
    if epoch % 2:
        raise OddEpochError(f"{name} must be even, got {epoch}")
    return epoch


def _log_gamma_half_ratio(n: np.ndarray) -> np.ndarray:
    """log Gamma(n + 1/2) - log Gamma(n + 1), for n >= 8."""
    n = np.asarray(n, dtype=float)
    main = -0.5 * np.log(n) + n * np.log1p(0.5 / n) - (n + 0.5) * np.log1p(1.0 / n) + 0.5
    a, b = n + 0.5, n + 1.0
    corr = np.zeros_like(n)
    for k, c in enumerate(_STIRLING):
        p = 2 * k + 1
        corr += c * (a ** -p - b ** -p)
    return main + corr


def at_origin_prob_exact(epoch: int) -> Fraction:
    """u_2n = C(2n, n) / 4^n as an exact rational."""
    n = _check_even(epoch) // 2
    return Fraction(math.comb(2 * n, n), 4 ** n)


def log_at_origin_prob(epoch: int) -> float:
    """Natural log of u_epoch."""
    epoch = _check_even(epoch)
    if epoch <= EXACT_THRESHOLD:
        return math.log(at_origin_prob_exact(epoch))
    return float(_log_gamma_half_ratio(epoch // 2)) - _HALF_LOG_PI


def at_origin_prob(epoch: int) -> float:
    """Probability the walk sits at the origin at ``epoch`` (u_2n)."""
    epoch = _check_even(epoch)
    if epoch <= EXACT_THRESHOLD:
        return float(at_origin_prob_exact(epoch))
    return math.exp(log_at_origin_prob(epoch))


def _origin_table(n: int) -> np.ndarray:
    """u_0, u_2, ..., u_2n as a float vector."""
    u = np.empty(n + 1)
    cut = min(n, EXACT_THRESHOLD // 2)
    for k in range(cut + 1):
        u[k] = float(Fraction(math.comb(2 * k, k), 4 ** k))
    if n > cut:
        ks = np.arange(cut + 1, n + 1)
        u[cut + 1 :] = np.exp(_log_gamma_half_ratio(ks) - _HALF_LOG_PI)
    return u


def no_return_survival_exact(epoch: int) -> Fraction:
    _check_even(epoch, minimum=2)
    return at_origin_prob_exact(epoch)


def no_return_survival(epoch: int) -> float:
    """P(first return time > epoch), which equals u_epoch."""
    _check_even(epoch, minimum=2)
    return at_origin_prob(epoch)


def no_return_survival_asymptotic(epoch: int) -> float:
    """Leading-order tail 1/sqrt(n pi) with epoch = 2n; poor for small n (0.564 vs 0.5 at 2)."""
    n = _check_even(epoch, minimum=2) // 2
    return 1.0 / math.sqrt(n * math.pi)


def first_return_pmf_exact(epoch: int) -> Fraction:
    epoch = _check_even(epoch, minimum=2)
    return at_origin_prob_exact(epoch - 2) - at_origin_prob_exact(epoch)


def first_return_pmf(epoch: int) -> float:
    """P(first return happens exactly at epoch) = u_{2n-2} - u_{2n}.

    Evaluated as u_2n / (2n - 1), the same quantity without the subtraction.
    """
    epoch = _check_even(epoch, minimum=2)
    return at_origin_prob(epoch) / (epoch - 1)


def return_count_pmf_exact(horizon: int) -> list[Fraction]:
    """P(r returns in 2n steps) = C(2n - r, n) / 2^(2n - r), r = 0..n."""
    n = _check_even(horizon, "horizon") // 2
    return [Fraction(math.comb(2 * n - r, n), 2 ** (2 * n - r)) for r in range(n + 1)]


def return_count_pmf(horizon: int) -> ReturnCountPmf:
    horizon = _check_even(horizon, "horizon")
    n = horizon // 2
    mass = np.empty(n + 1)
    # P(0) = u_2n; consecutive ratio is 2 (n - r) / (2n - r)
    mass[0] = at_origin_prob(horizon)
    for r in range(n):
        mass[r + 1] = mass[r] * (2.0 * (n - r) / (2 * n - r))
    return ReturnCountPmf(horizon, mass)


def expected_returns_exact(horizon: int) -> Fraction:
    n = _check_even(horizon, "horizon") // 2
    return (2 * n + 1) * at_origin_prob_exact(horizon) - 1


def expected_returns(horizon: int) -> float:
    """Mean number of returns in 2n steps, closed form (2n + 1) u_2n - 1."""
    horizon = _check_even(horizon, "horizon")
    return (horizon + 1) * at_origin_prob(horizon) - 1.0


def expected_returns_by_sum(horizon: int) -> float:
    """Same mean computed as u_2 + u_4 + ... + u_2n."""
    n = _check_even(horizon, "horizon") // 2
    return math.fsum(_origin_table(n)[1:])


def last_zero_pmf_exact(horizon: int) -> list[Fraction]:
    n = _check_even(horizon, "horizon") // 2
    u = [Fraction(math.comb(2 * k, k), 4 ** k) for k in range(n + 1)]
    return [u[k] * u[n - k] for k in range(n + 1)]


def last_zero_pmf(horizon: int) -> LastZeroPmf:
    """Discrete arcsine law: mass at epoch 2k is u_2k * u_{2n-2k}."""
    n = _check_even(horizon, "horizon") // 2
    u = _origin_table(n)
    return LastZeroPmf(horizon, u * u[::-1])


def last_zero_cdf_exact(horizon: int, epoch: int) -> Fraction:
    horizon = _check_even(horizon, "horizon")
    epoch = _check_even(epoch)
    if epoch > horizon:
        raise ValueError(f"epoch {epoch} exceeds horizon {horizon}")
    return sum(last_zero_pmf_exact(horizon)[: epoch // 2 + 1], Fraction(0))


def last_zero_cdf(horizon: int, epoch: int) -> float:
    """P(last visit to 0 within ``horizon`` steps happens at or before ``epoch``)."""
    return last_zero_pmf(horizon).cdf(epoch)
