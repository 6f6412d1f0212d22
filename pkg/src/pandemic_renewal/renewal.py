"""Renewal processes S_n = X_1 + ... + X_n, N(t), and a seeded Monte Carlo ensemble.

Random streams
--------------
Replicate ``i`` of an ensemble seeded with ``base_seed`` draws from
``Philox4x64-10`` (numpy) keyed by the first two 64-bit words of
``SeedSequence(base_seed)`` with its 256-bit counter starting at
``(0, 0, 0, i)``. The stream therefore depends on ``(base_seed, i)`` only, so
any split of the replicates across processes reproduces the same paths.

Random-walk paths consume the raw 64-bit outputs of that stream, one +/-1
step per bit, least significant bit first (bit 1 is a step up). Exponential
gaps are ``Generator.standard_exponential() / rate`` drawn in order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from . import exact_rw, poisson_model

__all__ = [
    "GENERATOR_ID",
    "DEFAULT_CAP",
    "CensoredSample",
    "StepSource",
    "ExponentialInterarrival",
    "RandomWalkInterarrival",
    "InterarrivalModel",
    "RenewalPath",
    "Estimate",
    "Probes",
    "EnsembleStats",
    "replicate_stream",
    "sample_interarrival_rw",
    "simulate_path",
    "simulate_replicate",
    "run_ensemble",
    "exact_references",
]

GENERATOR_ID = "numpy-philox4x64-10/key=seedsequence(base_seed)/counter=(0,0,0,replicate)"

#: Step cap for a single random-walk first-return draw.
DEFAULT_CAP = 10**8

_BLOCK = 4096


class CensoredSample(Exception):
    """A first-return draw reached its step cap before returning to 0.

    ``steps`` is the cap that was hit; ``partial`` holds the events seen so far
    when raised from :func:`simulate_path`.
    """

    def __init__(self, steps: int, partial: "RenewalPath | None" = None):
        self.steps = steps
        self.partial = partial
        super().__init__(f"no return to origin within {steps} steps (censored)")


def _stream_key(base_seed: int) -> np.ndarray:
    if base_seed < 0:
        raise ValueError(f"base_seed must be non-negative, got {base_seed}")
    return np.random.SeedSequence(base_seed).generate_state(2, np.uint64)


def _bitgen(key: np.ndarray, index: int) -> np.random.Philox:
    return np.random.Philox(key=key, counter=np.array([0, 0, 0, index], dtype=np.uint64))


def replicate_stream(base_seed: int, index: int) -> np.random.Generator:
    """Independent generator for replicate ``index`` of an ensemble."""
    if index < 0:
        raise ValueError(f"replicate index must be non-negative, got {index}")
    return np.random.Generator(_bitgen(_stream_key(base_seed), index))


def _words_to_steps(words: np.ndarray) -> np.ndarray:
    """uint64 words (..., W) -> int8 steps (..., 64 W), LSB first, bit 1 -> +1."""
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    bits = np.unpackbits(raw, axis=-1, bitorder="little")
    return (bits.astype(np.int8) << 1) - 1


class StepSource:
    """+/-1 steps read from the raw output of a generator's bit generator."""

    def __init__(self, stream: np.random.Generator | np.random.BitGenerator):
        self._bitgen = stream.bit_generator if isinstance(stream, np.random.Generator) else stream
        self._buf = np.empty(0, dtype=np.int8)
        self._pos = 0

    def take(self, k: int) -> np.ndarray:
        avail = self._buf.size - self._pos
        if avail < k:
            words = self._bitgen.random_raw(-(-(k - avail) // 64))
            self._buf = np.concatenate([self._buf[self._pos :], _words_to_steps(words)])
            self._pos = 0
        out = self._buf[self._pos : self._pos + k]
        self._pos += k
        return out

    def unread(self, k: int) -> None:
        if k > self._pos:
            raise ValueError("cannot unread more steps than were taken")
        self._pos -= k


def sample_interarrival_rw(stream, cap: int = DEFAULT_CAP) -> int:
    """Walk +/-1 steps from 0 until the first return; return the (even) step count.

    Raises :class:`CensoredSample` if no return happens within ``cap`` steps.
    ``stream`` is a :class:`StepSource` or a numpy Generator; a Generator gets
    a fresh source, so leftover bits of its last raw word are discarded.
    """
    source = stream if isinstance(stream, StepSource) else StepSource(stream)
    pos = 0
    taken = 0
    chunk = 64
    while taken < cap:
        k = min(chunk, cap - taken)
        walk = pos + np.cumsum(source.take(k), dtype=np.int64)
        hits = np.flatnonzero(walk == 0)
        if hits.size:
            j = int(hits[0]) + 1
            source.unread(k - j)
            return taken + j
        pos = int(walk[-1])
        taken += k
        chunk = min(chunk * 2, 1 << 20)
    raise CensoredSample(cap)


@dataclass(frozen=True)
class ExponentialInterarrival:
    """Exponential gaps with the given rate (events per unit time)."""

    rate: float

    def __post_init__(self):
        poisson_model.check_rate(self.rate)

    def sample(self, stream: np.random.Generator, size=None):
        return stream.standard_exponential(size) / self.rate

    def _events(self, stream, horizon: float) -> list[float]:
        events: list[float] = []
        t = 0.0
        while True:
            t = t + self.sample(stream)
            if t > horizon:
                return events
            events.append(t)

    def tail(self, t: float) -> float:
        return poisson_model.exp_tail(self.rate, max(t, 0.0))

    def mean(self) -> float:
        return 1.0 / self.rate

    def count_pmf(self, horizon: float) -> np.ndarray:
        return poisson_model.count_pmf(self.rate, horizon).mass

    def expected_count(self, horizon: float) -> float:
        return poisson_model.count_mean(self.rate, horizon)

    def last_event_cdf(self, horizon: float, t: float) -> float:
        """P(no event in (t, horizon])."""
        return 1.0 if t >= horizon else math.exp(-self.rate * (horizon - t))

    def describe(self) -> str:
        return f"exponential(rate={self.rate!r})"


@dataclass(frozen=True)
class RandomWalkInterarrival:
    """Gaps are first-return times of a simple symmetric walk, ``unit_scale`` time units per step."""

    cap: int = DEFAULT_CAP
    unit_scale: float = 1.0

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError(f"cap must be >= 1, got {self.cap}")
        if not (self.unit_scale > 0 and math.isfinite(self.unit_scale)):
            raise ValueError(f"unit_scale must be positive, got {self.unit_scale!r}")

    def steps(self, t: float) -> int:
        return max(0, math.floor(t / self.unit_scale))

    def sample(self, stream) -> float:
        return sample_interarrival_rw(stream, self.cap) * self.unit_scale

    def _events(self, stream, horizon: float) -> list[float]:
        source = StepSource(stream) if not isinstance(stream, StepSource) else stream
        total = self.steps(horizon)
        epochs: list[int] = []
        s = 0
        while s < total:
            remaining = total - s
            try:
                s += sample_interarrival_rw(source, min(self.cap, remaining))
            except CensoredSample as exc:
                if remaining <= self.cap:
                    break
                exc.partial = [e * self.unit_scale for e in epochs]
                raise
            epochs.append(s)
        return [e * self.unit_scale for e in epochs]

    def tail(self, t: float) -> float:
        s = exact_rw.floor_even(self.steps(t))
        return 1.0 if s < 2 else exact_rw.no_return_survival(s)

    def mean(self) -> float:
        return math.inf

    def count_pmf(self, horizon: float) -> np.ndarray:
        return exact_rw.return_count_pmf(exact_rw.floor_even(self.steps(horizon))).mass

    def expected_count(self, horizon: float) -> float:
        return exact_rw.expected_returns(exact_rw.floor_even(self.steps(horizon)))

    def last_event_cdf(self, horizon: float, t: float) -> float:
        h = exact_rw.floor_even(self.steps(horizon))
        e = min(exact_rw.floor_even(self.steps(t)), h)
        return exact_rw.last_zero_cdf(h, e)

    def describe(self) -> str:
        return f"random-walk(cap={self.cap};unit_scale={self.unit_scale!r})"


InterarrivalModel = Union[ExponentialInterarrival, RandomWalkInterarrival]


@dataclass(frozen=True)
class RenewalPath:
    horizon: float
    event_times: tuple[float, ...]

    @property
    def count(self) -> int:
        return len(self.event_times)

    @property
    def last_event(self) -> float | None:
        return self.event_times[-1] if self.event_times else None


def simulate_path(model: InterarrivalModel, horizon: float, stream) -> RenewalPath:
    """Accumulate gaps until S_{n+1} > horizon; N(horizon) = 0 if the first gap overshoots."""
    if not horizon >= 0:
        raise ValueError(f"horizon must be non-negative, got {horizon!r}")
    try:
        events = model._events(stream, horizon)
    except CensoredSample as exc:
        raise CensoredSample(exc.steps, RenewalPath(horizon, tuple(exc.partial or ()))) from None
    return RenewalPath(horizon, tuple(events))


def simulate_replicate(model: InterarrivalModel, horizon: float, base_seed: int, index: int) -> RenewalPath:
    return simulate_path(model, horizon, replicate_stream(base_seed, index))


class Estimate(NamedTuple):
    value: float
    std_error: float


@dataclass(frozen=True)
class Probes:
    """Gap-tail thresholds (P(first gap > g)) and last-event epochs (P(last event <= e))."""

    gaps: tuple[float, ...] = ()
    last_events: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gaps", tuple(float(g) for g in self.gaps))
        object.__setattr__(self, "last_events", tuple(float(e) for e in self.last_events))


@dataclass(frozen=True)
class EnsembleStats:
    model: str
    horizon: float
    replicates: int
    base_seed: int
    generator: str
    censored: int
    count_pmf: np.ndarray
    count_pmf_se: np.ndarray
    count_mean: Estimate
    last_event_cdf: dict[float, Estimate] = field(default_factory=dict)
    gap_tail: dict[float, Estimate] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# per-replicate batch kernels; each returns arrays indexed by replicate
# (count within horizon, last event within horizon or 0, first event or inf,
# censored flag)


def _block_exponential(model, horizon, sim_horizon, key, start, stop):
    n = stop - start
    counts = np.empty(n, dtype=np.int64)
    last = np.zeros(n)
    first = np.empty(n)
    mu = model.rate * sim_horizon
    m = max(8, math.ceil(mu + 6 * math.sqrt(mu) + 6))
    for j, i in enumerate(range(start, stop)):
        gen = np.random.Generator(_bitgen(key, i))
        gaps = model.sample(gen, m)
        times = np.cumsum(gaps)
        while times[-1] <= sim_horizon:
            gaps = np.concatenate([gaps, model.sample(gen, m)])
            times = np.cumsum(gaps)
        c = int(np.searchsorted(times, horizon, side="right"))
        counts[j] = c
        if c:
            last[j] = times[c - 1]
        first[j] = times[0]
    return counts, last, first, np.zeros(n, dtype=bool)


def _block_random_walk(model, horizon, sim_horizon, key, start, stop):
    hs = model.steps(sim_horizon)
    h = model.steps(horizon)
    n = stop - start
    if hs == 0:
        return np.zeros(n, np.int64), np.zeros(n), np.full(n, np.inf), np.zeros(n, bool)
    w = -(-hs // 64)
    words = np.empty((n, w), dtype=np.uint64)
    for j, i in enumerate(range(start, stop)):
        words[j] = _bitgen(key, i).random_raw(w)
    walk = np.cumsum(_words_to_steps(words)[:, :hs], axis=1, dtype=np.int32)
    zero = walk == 0  # column c is epoch c + 1

    censored = np.zeros(n, dtype=bool)
    if hs > model.cap:
        for j in range(n):
            epochs = np.flatnonzero(zero[j]) + 1
            bounds = np.concatenate([[0], epochs, [hs]])
            over = np.flatnonzero(np.diff(bounds) > model.cap)
            if over.size:
                censored[j] = True
                zero[j, bounds[over[0]] :] = False

    within = zero[:, :h]
    counts = within.sum(axis=1).astype(np.int64)
    last_idx = h - np.argmax(within[:, ::-1], axis=1) if h else np.zeros(n, np.int64)
    last = np.where(counts > 0, last_idx, 0) * model.unit_scale
    any_zero = zero.any(axis=1)
    first = np.where(any_zero, (np.argmax(zero, axis=1) + 1) * model.unit_scale, np.inf)
    return counts, last.astype(float), first, censored


def _simulate_block(args):
    model, horizon, sim_horizon, key, start, stop = args
    if isinstance(model, ExponentialInterarrival):
        return _block_exponential(model, horizon, sim_horizon, key, start, stop)
    return _block_random_walk(model, horizon, sim_horizon, key, start, stop)


def _bernoulli(hits: np.ndarray) -> Estimate:
    p = float(hits.mean())
    return Estimate(p, math.sqrt(p * (1 - p) / hits.size))


def run_ensemble(
    model: InterarrivalModel,
    horizon: float,
    replicates: int,
    base_seed: int,
    probes: Probes | None = None,
    workers: int | None = 1,
) -> EnsembleStats:
    """Simulate ``replicates`` independent paths and summarise them.

    Results depend only on the arguments other than ``workers``: blocks are
    merged in replicate order whatever the number of worker processes
    (``None`` means one per CPU).
    """
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    if not horizon >= 0:
        raise ValueError(f"horizon must be non-negative, got {horizon!r}")
    probes = probes or Probes()
    key = _stream_key(base_seed)
    sim_horizon = max([horizon, *probes.gaps])
    tasks = [
        (model, horizon, sim_horizon, key, s, min(s + _BLOCK, replicates))
        for s in range(0, replicates, _BLOCK)
    ]
    workers = workers or os.cpu_count() or 1
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_block, tasks))
    else:
        parts = [_simulate_block(t) for t in tasks]
    counts, last, first, censored = (np.concatenate(a) for a in zip(*parts))

    pmf = np.bincount(counts) / replicates
    pmf_se = np.sqrt(pmf * (1 - pmf) / replicates)
    sd = float(counts.std(ddof=1)) if replicates > 1 else 0.0
    return EnsembleStats(
        model=model.describe(),
        horizon=horizon,
        replicates=replicates,
        base_seed=base_seed,
        generator=GENERATOR_ID,
        censored=int(censored.sum()),
        count_pmf=pmf,
        count_pmf_se=pmf_se,
        count_mean=Estimate(float(counts.mean()), sd / math.sqrt(replicates)),
        last_event_cdf={e: _bernoulli(last <= e) for e in probes.last_events},
        gap_tail={g: _bernoulli(first > g) for g in probes.gaps},
    )


def exact_references(model: InterarrivalModel, horizon: float, probes: Probes) -> dict:
    """Exact counterparts of every quantity :func:`run_ensemble` estimates."""
    return {
        "count_pmf": model.count_pmf(horizon),
        "count_mean": model.expected_count(horizon),
        "last_event_cdf": {e: model.last_event_cdf(horizon, e) for e in probes.last_events},
        "gap_tail": {g: model.tail(g) for g in probes.gaps},
    }
