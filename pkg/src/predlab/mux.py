"""The tracking measure mu_x: a countable-state hidden-chain process whose
state-j emission is the j-th symbol of a fixed target sequence x.

Started from the chain's stationary law, the induced symbol process is
stationary and ergodic, and it assigns the target prefix x_{1..n} probability
at least pi1 / (n+1)^2 (the never-reset path from state 1), so its cumulative
log2 loss on x is at most -log2(pi1) + 2 log2(n+1) = o(n).

Numerics.  Word marginals are computed by a forward recursion over initial
states 1..J.  The recursion is exact for every tracked trajectory and carries
``dropped_mass``, a certified upper bound on the weight excluded by
truncation (the stationary tail pi1/J, plus anything removed by optional
pruning), giving the enclosure

    lower = sum of tracked weights <= mu_x(y) <= lower + dropped_mass.

All recursions run in linear probability space with exact (fsum) summation;
a tracked power-of-two rescaling guards against underflow.  The enclosure is
an absolute one: dropped trajectories are never re-examined, so the interval
width never shrinks below dropped_mass.  Consequently the *point* predictor
exposed here does not midpoint the enclosures (for long pasts the tail bound
can exceed the marginal itself, making midpoints uninformative); it serves
the exact conditionals of the truncated measure - the chain started from the
stationary law restricted to states 1..J and renormalized - whose cumulative
loss telescopes to the certified marginal lower bound.  Interval widths are
still computed and logged for every conditional query.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import PI1, ChainSpec, sample_path
from .core import (
    IMPOSSIBLE,
    LogInterval,
    Predictor,
    SequenceSource,
    SourceExhaustedError,
    Symbol,
    Word,
    log2_sum,
    validate_symbol,
)

#: rescale the forward weights when their total drops below this
_RESCALE_FLOOR = 1e-270


class ImpossiblePastError(ValueError):
    """Conditioning on a past whose marginal upper bound is zero."""


def log_loss_bound(n: int) -> float:
    """Certified ceiling on the cumulative log2 loss of mu_x on x_{1..n}:
    -log2(pi1) + 2 log2(n+1)."""
    if n < 1:
        raise ValueError("horizon must be >= 1")
    return -math.log2(PI1) + 2.0 * math.log2(n + 1)


@dataclass
class ForwardState:
    """Forward weights after consuming t symbols.

    weights[k] is the (scaled) joint weight of "state k+1 now, all consumed
    symbols matched"; true weights are weights * 2**scale_log2.  dropped_mass
    is an absolute certified bound on all excluded weight.  The frontier
    (array length) grows by one state per consumed symbol past the first.
    """

    t: int
    weights: np.ndarray
    dropped_mass: float
    scale_log2: float = 0.0

    def total(self) -> float:
        return math.fsum(self.weights.tolist())

    def log2_lower(self) -> float:
        w = self.total()
        return math.log2(w) + self.scale_log2 if w > 0.0 else IMPOSSIBLE

    def log2_upper(self) -> float:
        lo = self.log2_lower()
        if self.dropped_mass <= 0.0:
            return lo
        return min(0.0, log2_sum(lo, math.log2(self.dropped_mass)))

    def interval(self) -> LogInterval:
        lo = self.log2_lower()
        hi = self.log2_upper()
        # carry the exact certified width unless the upper end was clamped at 1
        width = self.dropped_mass if hi < 0.0 or self.dropped_mass == 0.0 else None
        return LogInterval(lo, hi, width_prob=width)


class MuX:
    """The tracking measure for one target sequence at one truncation.

    Immutable once built; marginal and conditional queries are pure.
    """

    def __init__(
        self,
        source: SequenceSource,
        chain: ChainSpec | None = None,
        prune_threshold: float = 0.0,
    ) -> None:
        self.source = source
        self.chain = chain or ChainSpec()
        if prune_threshold < 0.0:
            raise ValueError("prune_threshold must be >= 0")
        self.prune_threshold = prune_threshold
        self._cap = 0
        self._emis = np.empty(0, dtype=np.uint8)
        self._p = np.empty(0, dtype=np.float64)
        self._one_minus_p = np.empty(0, dtype=np.float64)

    # -- cached per-state tables ------------------------------------------

    def _ensure_tables(self, size: int) -> None:
        """Emission and transition tables for states 1..size; the source must
        serve indices up to size or this raises its exhaustion error."""
        if size <= self._cap:
            return
        new_cap = max(size, 2 * self._cap, self.chain.truncation_level + 64)
        try:
            self._emis = self.source.prefix_array(new_cap)
        except SourceExhaustedError:
            if new_cap == size:
                raise
            new_cap = size  # finite source: take exactly what the query needs
            self._emis = self.source.prefix_array(new_cap)
        self._p = self.chain.up_probs(new_cap)
        self._one_minus_p = 1.0 - self._p
        self._cap = new_cap

    # -- forward recursion --------------------------------------------------

    def initial_state(self) -> ForwardState:
        """Stationary weights over initial states 1..J, tail mass dropped."""
        J = self.chain.truncation_level
        self._ensure_tables(J)
        return ForwardState(
            t=0,
            weights=self.chain.stationary_weights(J),
            dropped_mass=self.chain.tail_mass_bound,
        )

    def propagate(self, state: ForwardState) -> tuple[np.ndarray, float, float]:
        """One transition step without emission commitment.

        Returns (v, S0, S1): v are the pre-emission weights at time t+1 and
        S_a = sum of v over states emitting a.  At t=0 there is no transition
        (the weights already are the time-1 state law).  S0 + S1 equals the
        current total up to rounding, so conditionals formed from them are
        normalized.
        """
        w = state.weights
        self._ensure_tables(len(w) + 1)
        if state.t == 0:
            v = w
        else:
            inflow = math.fsum((w * self._one_minus_p[: len(w)]).tolist())
            v = np.empty(len(w) + 1, dtype=np.float64)
            v[0] = inflow
            v[1:] = w * self._p[: len(w)]
        emis = self._emis[: len(v)]
        s1 = math.fsum(v[emis == 1].tolist())
        s0 = math.fsum(v[emis == 0].tolist())
        return v, s0, s1

    def advance(self, state: ForwardState, symbol: Symbol,
                v: np.ndarray | None = None) -> ForwardState:
        """Consume one symbol; pass ``v`` to reuse a ``propagate`` result."""
        validate_symbol(symbol)
        if v is None:
            v = self.propagate(state)[0]
        self._ensure_tables(len(v))
        w = np.where(self._emis[: len(v)] == symbol, v, 0.0)
        dropped = state.dropped_mass
        scale = state.scale_log2
        if self.prune_threshold > 0.0:
            true_w = w * 2.0**scale
            small = (true_w > 0.0) & (true_w < self.prune_threshold)
            if small.any():
                dropped += math.fsum(true_w[small].tolist())
                w = np.where(small, 0.0, w)
        total = math.fsum(w.tolist())
        if 0.0 < total < _RESCALE_FLOOR:
            shift = -math.floor(math.log2(total))
            w = w * 2.0**shift
            scale -= shift
        return ForwardState(t=state.t + 1, weights=w, dropped_mass=dropped,
                            scale_log2=scale)

    def forward(self, y: Word) -> ForwardState:
        state = self.initial_state()
        for s in y:
            state = self.advance(state, s)
        return state

    # -- queries --------------------------------------------------------------

    def marginal(self, y: Word) -> LogInterval:
        """Certified enclosure of mu_x(y); the width equals the dropped mass."""
        if len(y) == 0:
            raise ValueError("marginal of the empty word is 1; query length >= 1")
        return self.forward(y).interval()

    def conditional_next(self, past: Word) -> tuple[LogInterval, LogInterval]:
        """Enclosures of mu_x(next=0 | past) and mu_x(next=1 | past).

        Outward-rounded interval division of the one-step-extended marginal
        by the past marginal.  For pasts whose tracked mass has died the
        enclosures are vacuous ([0, 1]); if even the upper bound of the past
        marginal is zero the conditioning is impossible.
        """
        state = self.forward(tuple(past))
        _, s0, s1 = self.propagate(state)
        return self._conditional_intervals(state, s0, s1)

    def _conditional_intervals(
        self, state: ForwardState, s0: float, s1: float
    ) -> tuple[LogInterval, LogInterval]:
        den_lower = s0 + s1
        d = state.dropped_mass
        if den_lower <= 0.0 and d <= 0.0:
            raise ImpossiblePastError(
                "conditioning on impossible past (upper-bound marginal is 0)"
            )
        scale = state.scale_log2
        out = []
        log2_d = math.log2(d) if d > 0.0 else IMPOSSIBLE
        log2_den_lower = (
            math.log2(den_lower) + scale if den_lower > 0.0 else IMPOSSIBLE
        )
        log2_den_upper = log2_sum(log2_den_lower, log2_d)
        for s_a in (s0, s1):
            log2_num_lower = math.log2(s_a) + scale if s_a > 0.0 else IMPOSSIBLE
            log2_num_upper = log2_sum(log2_num_lower, log2_d)
            lo = log2_num_lower - log2_den_upper
            hi = min(0.0, log2_num_upper - log2_den_lower)
            # one-ulp outward nudge: the log-space ops are not directed-rounded
            if math.isfinite(lo):
                lo = float(np.nextafter(lo, -np.inf))
            if hi < 0.0 and math.isfinite(hi):
                hi = float(np.nextafter(hi, 0.0))
            out.append(LogInterval(min(lo, hi), hi))
        return out[0], out[1]

    # -- views ---------------------------------------------------------------

    def predictor(self) -> "MuxPredictor":
        return MuxPredictor(self)

    def fresh_predictor(self) -> "MuxPredictor":
        return MuxPredictor(self)

    def sample_trajectory(self, n: int, seed: int) -> np.ndarray:
        """Emit along a stationary-start chain path; deterministic per seed.

        The source must serve indices up to the highest visited state.
        """
        if n < 1:
            raise ValueError("trajectory length must be >= 1")
        path = sample_path(n, seed, start=None)
        max_state = int(path.states.max())
        emis = self.source.prefix_array(max_state)
        return emis[path.states - 1]


class MuxPredictor(Predictor):
    """Next-symbol conditionals of the truncated tracking measure.

    Serves the exact conditionals of the chain-with-emissions process whose
    initial state law is the stationary one restricted to 1..J and
    renormalized; cumulative log2 loss along any sequence telescopes to the
    certified forward lower bound.  Off the truncated support (a past of
    tracked mass zero) the predictor falls back to the uniform conditional,
    which equals the renormalized midpoints of the then-vacuous enclosures;
    this measure-zero convention keeps it total for adversarial use.

    ``last_interval_width`` records the enclosure width of the most recent
    prediction for diagnostic logging.
    """

    def __init__(self, mux: MuX) -> None:
        self.mux = mux
        self._state = mux.initial_state()
        self._dead = False
        self._cache: tuple[np.ndarray, float, float] | None = None
        self.last_interval_width = 0.0

    def fresh(self) -> "MuxPredictor":
        return MuxPredictor(self.mux)

    @property
    def t(self) -> int:
        return self._state.t

    def log2_mass(self) -> float:
        """log2 of the tracked (unnormalized) mass of the observed past."""
        return self._state.log2_lower()

    def log2_initial_mass(self) -> float:
        return self.mux.initial_state().log2_lower()

    def _propagated(self) -> tuple[np.ndarray, float, float]:
        if self._cache is None:
            self._cache = self.mux.propagate(self._state)
        return self._cache

    def predict(self) -> tuple[float, float]:
        if self._dead:
            self.last_interval_width = 1.0
            return (0.5, 0.5)
        _, s0, s1 = self._propagated()
        den = s0 + s1
        i0, _ = self.mux._conditional_intervals(self._state, s0, s1)
        self.last_interval_width = i0.width
        if den <= 0.0:
            return (0.5, 0.5)
        p1 = s1 / den
        return (1.0 - p1, p1)

    def observe(self, symbol: Symbol) -> None:
        validate_symbol(symbol)
        if self._dead:
            return
        v, s0, s1 = self._propagated()
        self._cache = None
        if s0 + s1 <= 0.0:
            self._dead = True
            return
        self._state = self.mux.advance(self._state, symbol, v=v)
        if (s1 if symbol else s0) <= 0.0:
            self._dead = True


def brute_force_marginal(mux: MuX, y: Word, max_init_state: int) -> float:
    """Independent oracle for ``MuX.marginal``: exact enumeration of every
    emission-consistent state path from every initial state <= max_init_state.

    Exponential in len(y); refuses len(y) > 14 or max_init_state > 64.  The
    result equals the forward lower bound at truncation J = max_init_state.
    """
    n = len(y)
    if not 1 <= n <= 14:
        raise ValueError("brute force handles 1 <= len(y) <= 14")
    if not 1 <= max_init_state <= 64:
        raise ValueError("brute force handles max_init_state <= 64")
    emis = mux.source.prefix_array(max_init_state + n)
    y_arr = tuple(validate_symbol(s) for s in y)
    spec = mux.chain
    leaf_probs: list[float] = []

    def extend(state: int, t: int, acc: float) -> None:
        if emis[state - 1] != y_arr[t]:
            return
        if t + 1 == n:
            leaf_probs.append(acc)
            return
        p = (state * state) / ((state + 1) * (state + 1))
        extend(state + 1, t + 1, acc * p)
        extend(1, t + 1, acc * (1.0 - p))

    weights = spec.stationary_weights(max_init_state)
    for j in range(1, max_init_state + 1):
        extend(j, 0, float(weights[j - 1]))
    return math.fsum(leaf_probs)
