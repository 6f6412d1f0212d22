"""Independent reference computations for the random-walk laws.

Nothing here uses binomial closed forms: quantities come from enumerating
every +/-1 path or from counting paths by dynamic programming.
"""

from collections import Counter
from fractions import Fraction

import numpy as np


def all_paths(steps):
    """Every +/-1 path of the given length as rows of partial sums (2**steps rows)."""
    codes = np.arange(2**steps, dtype=np.uint32)[:, None]
    bits = (codes >> np.arange(steps, dtype=np.uint32)) & 1
    return np.cumsum(2 * bits.astype(np.int64) - 1, axis=1)


def enumerate_laws(steps):
    """Exact laws over 2**steps equally likely paths.

    Returns a dict of Counters normalised to Fractions:
    ``at_origin`` (P(S_steps = 0)), ``first_return`` (epoch -> P, with key
    None meaning no return within the horizon), ``return_count`` and
    ``last_zero`` (0 when the walk never returns).
    """
    walks = all_paths(steps)
    total = 2**steps
    zero = walks == 0
    first, count, last = Counter(), Counter(), Counter()
    for row in zero:
        epochs = np.flatnonzero(row) + 1
        first[int(epochs[0]) if epochs.size else None] += 1
        count[int(epochs.size)] += 1
        last[int(epochs[-1]) if epochs.size else 0] += 1

    def norm(c):
        return {k: Fraction(v, total) for k, v in c.items()}

    return {
        "at_origin": Fraction(int(zero[:, -1].sum()), total),
        "first_return": norm(first),
        "return_count": norm(count),
        "last_zero": norm(last),
    }


def origin_count_by_convolution(steps):
    """Number of paths ending at 0, by repeated convolution of the step law (exact ints)."""
    counts = {0: 1}
    for _ in range(steps):
        nxt = Counter()
        for x, c in counts.items():
            nxt[x - 1] += c
            nxt[x + 1] += c
        counts = nxt
    return counts.get(0, 0)


def no_zero_after(steps, split):
    """P(no visit to 0 at epochs split+1..steps), exact, by counting paths."""
    counts = Counter({0: 1})
    for t in range(1, steps + 1):
        nxt = Counter()
        for x, c in counts.items():
            for y in (x - 1, x + 1):
                if t > split and y == 0:
                    continue
                nxt[y] += c
        counts = nxt
    return Fraction(sum(counts.values()), 2**steps)


def return_count_dp(steps):
    """Float pmf of the number of returns, by DP over (position, returns so far)."""
    width = 2 * steps + 1
    grid = np.zeros((width, steps // 2 + 2))
    grid[steps, 0] = 1.0  # row index = position + steps
    for _ in range(steps):
        nxt = np.zeros_like(grid)
        nxt[1:] += 0.5 * grid[:-1]
        nxt[:-1] += 0.5 * grid[1:]
        # arriving at 0 bumps the count
        arrived = nxt[steps].copy()
        nxt[steps] = 0.0
        nxt[steps, 1:] = arrived[:-1]
        grid = nxt
    return grid.sum(axis=0)[: steps // 2 + 1]
