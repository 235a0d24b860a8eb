"""The up-or-reset countable-state chain driving the tracking measure.

State space is {1, 2, 3, ...}; from state j the chain moves to j+1 with
probability p_j = j^2/(j+1)^2 and resets to state 1 otherwise.  The first
return to state 1 after exactly n steps has probability
f(n) = (1 - p_n) / n^2 = (2n+1) / (n^2 (n+1)^2), which telescopes:
partial sums of f equal 1 - 1/(N+1)^2, and the mean return time converges
to pi^2/6.  The stationary weights are therefore pi_j = pi1 / j^2 with
pi1 = 6/pi^2; the balance equations pi_{j+1} = pi_j * p_j hold exactly.

Truncation bookkeeping: the stationary mass above a level J is bounded by
pi1/J (integral bound on sum of 1/j^2), which is the certified tail mass
carried by downstream enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

#: stationary weight of state 1, 6/pi^2
PI1 = 6.0 / math.pi**2


def transition_prob(j: int) -> float:
    """p_j: probability of moving up from state j (reset has 1 - p_j)."""
    if j < 1:
        raise ValueError(f"state must be >= 1, got {j}")
    return (j * j) / ((j + 1) * (j + 1))


def first_return_prob(n: int) -> float:
    """Probability that the first return to state 1 takes exactly n steps."""
    if n < 1:
        raise ValueError(f"step count must be >= 1, got {n}")
    return (2 * n + 1) / (n * n * (n + 1) * (n + 1))


def return_prob_partial_sum(N: int) -> float:
    """Compensated partial sum of the first-return law up to N steps."""
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(1, N + 1, dtype=np.float64)
    terms = (2.0 * n + 1.0) / (n * n * (n + 1.0) * (n + 1.0))
    return math.fsum(terms.tolist())


def mean_return_time(N: int) -> tuple[float, float]:
    """(partial sum of n * f(n) up to N, certified remainder bound).

    The remainder bound is 3/N since n*f(n) < 3/n^2 and the tail of 1/n^2
    past N is at most 1/N.  The enclosure [sum, sum + 3/N] contains the
    limit pi^2/6; its midpoint is the point estimate.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(1, N + 1, dtype=np.float64)
    terms = (2.0 * n + 1.0) / (n * (n + 1.0) * (n + 1.0))
    return math.fsum(terms.tolist()), 3.0 / N


def stationary_weight(j: int) -> float:
    """pi_j = pi1 / j^2, the unique stationary distribution."""
    if j < 1:
        raise ValueError(f"state must be >= 1, got {j}")
    return PI1 / (j * j)


@lru_cache(maxsize=8)
def _up_probs(size: int) -> np.ndarray:
    j = np.arange(1, size + 1, dtype=np.float64)
    return (j * j) / ((j + 1.0) * (j + 1.0))


@lru_cache(maxsize=8)
def _stationary_cdf(size: int) -> np.ndarray:
    j = np.arange(1, size + 1, dtype=np.float64)
    return np.cumsum(PI1 / (j * j))


@dataclass(frozen=True)
class ChainSpec:
    """Truncation policy for computations over the infinite state space.

    truncation_level J is the largest explicitly represented initial state;
    tail_mass_bound certifies the stationary mass above J.
    """

    truncation_level: int = 10_000

    def __post_init__(self) -> None:
        if self.truncation_level < 1:
            raise ValueError("truncation_level must be >= 1")

    @property
    def tail_mass_bound(self) -> float:
        return PI1 / self.truncation_level

    def up_probs(self, size: int) -> np.ndarray:
        """p_1..p_size as an array."""
        return _up_probs(size)

    def stationary_weights(self, size: int) -> np.ndarray:
        """pi_1..pi_size as an array."""
        j = np.arange(1, size + 1, dtype=np.float64)
        return PI1 / (j * j)


@dataclass
class StatePath:
    """A sampled trajectory of the chain."""

    states: np.ndarray
    origin: str  # "stationary" or "fixed:<j>"
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.states)


#: default truncation for stationary-start sampling (tail hit ~ 6e-7)
SAMPLING_TRUNCATION = 10**6


def sample_stationary_state(
    rng: np.random.Generator, trunc: int = SAMPLING_TRUNCATION
) -> int:
    """Draw an initial state from the stationary law by inverse CDF over
    1..trunc with one lumped tail state; a tail hit (probability <= pi1/trunc)
    resamples within a second-level truncation at 10*trunc."""
    cdf = _stationary_cdf(trunc)
    u = rng.random()
    if u < cdf[-1]:
        return int(np.searchsorted(cdf, u, side="right")) + 1
    # Lumped tail: resample from the renormalized law on (trunc, 10*trunc],
    # clamping at the second level (mass beyond it ~ 1e-13 of a 1e-7 event).
    j = np.arange(trunc + 1, 10 * trunc + 1, dtype=np.float64)
    tail_cdf = np.cumsum(PI1 / (j * j))
    u2 = rng.random() * tail_cdf[-1]
    idx = min(int(np.searchsorted(tail_cdf, u2, side="right")), len(j) - 1)
    return trunc + 1 + idx


def sample_path(
    n: int,
    seed: int,
    start: int | None = None,
    sampling_trunc: int = SAMPLING_TRUNCATION,
) -> StatePath:
    """Length-n state path; ``start=None`` draws the initial state from the
    stationary law, ``start=j`` pins it.  Deterministic given the seed."""
    if n < 1:
        raise ValueError("path length must be >= 1")
    rng = np.random.default_rng(seed)
    if start is None:
        j0 = sample_stationary_state(rng, sampling_trunc)
        origin = "stationary"
    else:
        if start < 1:
            raise ValueError("fixed start state must be >= 1")
        j0 = start
        origin = f"fixed:{start}"
    states = np.empty(n, dtype=np.int64)
    states[0] = j0
    if n > 1:
        u = rng.random(n - 1)
        cap = 4096
        p = _up_probs(cap)
        j = j0
        for t in range(1, n):
            while j > cap:
                cap *= 2
                p = _up_probs(cap)
            j = j + 1 if u[t - 1] < p[j - 1] else 1
            states[t] = j
    return StatePath(states=states, origin=origin, seed=seed)


def chain_info(max_n: int, trunc: int) -> dict:
    """Summary tables and certified constants (CLI backend)."""
    if max_n < 1 or trunc < 1:
        raise ValueError("max_n and trunc must be >= 1")
    mrt, remainder = mean_return_time(trunc)
    return {
        "p": [transition_prob(j) for j in range(1, max_n + 1)],
        "f11": [first_return_prob(n) for n in range(1, max_n + 1)],
        "pi": [stationary_weight(j) for j in range(1, max_n + 1)],
        "pi1": PI1,
        "mean_return_time": {
            "partial_sum": mrt,
            "remainder_bound": remainder,
            "estimate": mrt + remainder / 2.0,
            "lower": mrt,
            "upper": mrt + remainder,
        },
        "first_return_partial_sum": return_prob_partial_sum(trunc),
        "tail_mass_bound": PI1 / trunc,
        "trunc": trunc,
    }
