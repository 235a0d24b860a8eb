"""Binary alphabet, log2-probability plumbing, the predictor contract, and
deterministic sequence sources.

Conventions used throughout the package:

* symbols are the ints 0 and 1; a Word is a tuple of symbols (the empty
  tuple is the empty past);
* probabilities of whole words are carried in log base 2 ("bits"), with
  probability zero represented by -inf (saturating: adding -inf keeps -inf,
  logaddexp2 with -inf is the identity);
* next-symbol conditionals are carried as a linear pair (p0, p1) that sums
  to 1 by construction, so exact comparisons against 1/2 are meaningful.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import numpy as np

Symbol = int
Word = tuple[int, ...]

EMPTY_WORD: Word = ()

#: log2 of probability zero; arithmetic with it saturates.
IMPOSSIBLE = float("-inf")


class SourceExhaustedError(ValueError):
    """A finite sequence source was asked for a symbol past its end."""


def validate_symbol(s: int) -> int:
    if s not in (0, 1):
        raise ValueError(f"symbol must be 0 or 1, got {s!r}")
    return s


def complement(s: Symbol) -> Symbol:
    return 1 - validate_symbol(s)


def parse_bits(text: str) -> Word:
    """Parse a bitstring like '0101' into a Word; rejects other characters."""
    word = []
    for ch in text:
        if ch == "0":
            word.append(0)
        elif ch == "1":
            word.append(1)
        else:
            raise ValueError(f"invalid bit character {ch!r}")
    return tuple(word)


def format_bits(word) -> str:
    return "".join("1" if s else "0" for s in word)


def log2_prob(p: float) -> float:
    """Probability -> log2, mapping 0 to IMPOSSIBLE."""
    if p < 0.0 or p > 1.0 + 1e-12:
        raise ValueError(f"not a probability: {p!r}")
    return math.log2(p) if p > 0.0 else IMPOSSIBLE


def prob(log2_p: float) -> float:
    """log2 -> probability (exp2); IMPOSSIBLE maps to 0."""
    return float(np.exp2(log2_p))


def log2_sum(a: float, b: float) -> float:
    """log2(2^a + 2^b); IMPOSSIBLE acts as the identity."""
    return float(np.logaddexp2(a, b))


def log2_product(a: float, b: float) -> float:
    """log2(2^a * 2^b); IMPOSSIBLE saturates."""
    return a + b


@dataclass(frozen=True)
class LogInterval:
    """Certified enclosure [lower, upper] of a probability, in log2 space.

    The probability-space width of the interval equals the certified mass
    excluded by truncation, so refining the truncation tightens it.  When
    that mass is known exactly it is carried in ``width_prob``; otherwise the
    width is derived from the log2 endpoints.
    """

    lower_log2: float
    upper_log2: float
    width_prob: float | None = None

    def __post_init__(self) -> None:
        if self.lower_log2 > self.upper_log2:
            raise ValueError(
                f"lower {self.lower_log2} exceeds upper {self.upper_log2}"
            )

    @classmethod
    def from_prob_bounds(cls, lower: float, upper: float) -> "LogInterval":
        return cls(log2_prob(lower), log2_prob(min(upper, 1.0)))

    @property
    def lower_prob(self) -> float:
        return prob(self.lower_log2)

    @property
    def upper_prob(self) -> float:
        return prob(self.upper_log2)

    @property
    def width(self) -> float:
        """Width in probability space."""
        if self.width_prob is not None:
            return self.width_prob
        return self.upper_prob - self.lower_prob

    @property
    def midpoint_prob(self) -> float:
        return 0.5 * (self.lower_prob + self.upper_prob)

    def contains(self, p: float, slack: float = 0.0) -> bool:
        return self.lower_prob - slack <= p <= self.upper_prob + slack


class Predictor(ABC):
    """Conditional next-symbol distribution oracle.

    A predictor is advanced incrementally: ``predict()`` returns the pair
    (P(next=0 | seen), P(next=1 | seen)) and ``observe(s)`` appends s to the
    seen past.  ``conditional(past)`` answers the same query statelessly on a
    fresh instance; the two routes must agree (tested).  Implementations
    guarantee p0 + p1 == 1 by deriving one coordinate as the complement of
    the other, so min(p0, p1) <= 1/2 holds exactly in floating point.
    """

    @abstractmethod
    def fresh(self) -> "Predictor":
        """A new instance of the same predictor with empty past."""

    @abstractmethod
    def predict(self) -> tuple[float, float]:
        """(P(next=0 | past so far), P(next=1 | past so far)), linear."""

    @abstractmethod
    def observe(self, symbol: Symbol) -> None:
        """Advance the internal past by one symbol."""

    def conditional(self, past: Word) -> tuple[float, float]:
        """Stateless query: distribution of the next symbol given ``past``."""
        p = self.fresh()
        for s in past:
            p.observe(validate_symbol(s))
        return p.predict()

    def log2_conditional(self, past: Word) -> tuple[float, float]:
        p0, p1 = self.conditional(past)
        return log2_prob(p0), log2_prob(p1)


# ---------------------------------------------------------------------------
# Sequence sources
# ---------------------------------------------------------------------------


class SequenceSource(ABC):
    """A rule producing an arbitrary-length deterministic binary sequence.

    ``symbol_at(t)`` is 1-indexed and pure: the same source parameters yield
    the same symbol on every call and every run.
    """

    #: spec string that reconstructs this source (used in artifact headers)
    spec: str = ""

    @abstractmethod
    def symbol_at(self, t: int) -> Symbol:
        """The t-th symbol, t >= 1."""

    def prefix(self, n: int) -> Word:
        if n < 0:
            raise ValueError("prefix length must be >= 0")
        return tuple(self.symbol_at(t) for t in range(1, n + 1))

    def prefix_array(self, n: int) -> np.ndarray:
        """First n symbols as a uint8 array (bulk form of ``prefix``)."""
        if n < 0:
            raise ValueError("prefix length must be >= 0")
        return np.fromiter(
            (self.symbol_at(t) for t in range(1, n + 1)), dtype=np.uint8, count=n
        )


def sequence_prefix(source: SequenceSource, n: int) -> Word:
    """x_{1..n} of the source; n = 0 gives the empty word."""
    return source.prefix(n)


class PeriodicSource(SequenceSource):
    """Endless repetition of a fixed nonempty pattern."""

    def __init__(self, pattern) -> None:
        if isinstance(pattern, str):
            pattern = parse_bits(pattern)
        self.pattern = tuple(validate_symbol(s) for s in pattern)
        if not self.pattern:
            raise ValueError("pattern must be nonempty")
        self.spec = f"periodic:{format_bits(self.pattern)}"

    def symbol_at(self, t: int) -> Symbol:
        if t < 1:
            raise ValueError("t must be >= 1")
        return self.pattern[(t - 1) % len(self.pattern)]

    def prefix_array(self, n: int) -> np.ndarray:
        base = np.asarray(self.pattern, dtype=np.uint8)
        reps = -(-n // len(base)) if n else 0
        return np.tile(base, max(reps, 1))[:n].copy()


class ChampernowneSource(SequenceSource):
    """Concatenated binary expansions of 0, 1, 2, ...: 0 1 10 11 100 ..."""

    spec = "champernowne"

    def symbol_at(self, t: int) -> Symbol:
        if t < 1:
            raise ValueError("t must be >= 1")
        # positions 1..2 hold "0" and "1"; integers with L bits (L >= 2)
        # contribute a block of L * 2^(L-1) symbols.
        if t <= 2:
            return t - 1
        pos = t - 3  # 0-based offset into the blocks for L >= 2
        length = 2
        while pos >= length * (1 << (length - 1)):
            pos -= length * (1 << (length - 1))
            length += 1
        number = (1 << (length - 1)) + pos // length
        return (number >> (length - 1 - pos % length)) & 1


class CoinFlipSource(SequenceSource):
    """Deterministic pseudorandom bits from a 64-bit seeded PCG64 stream."""

    _BLOCK = 1 << 16

    def __init__(self, seed: int) -> None:
        self.seed = int(seed)
        self.spec = f"coin:{self.seed}"
        self._rng = np.random.default_rng(self.seed)
        self._cache = np.empty(0, dtype=np.uint8)

    def _ensure(self, n: int) -> None:
        while len(self._cache) < n:
            block = self._rng.integers(0, 2, size=self._BLOCK, dtype=np.uint8)
            self._cache = np.concatenate([self._cache, block])

    def symbol_at(self, t: int) -> Symbol:
        if t < 1:
            raise ValueError("t must be >= 1")
        self._ensure(t)
        return int(self._cache[t - 1])

    def prefix_array(self, n: int) -> np.ndarray:
        self._ensure(n)
        return self._cache[:n].copy()


class FileSource(SequenceSource):
    """Bits read from a text file: one ASCII '0'/'1' per symbol, lines
    concatenated; any other character is rejected.  Finite: reading past the
    end raises SourceExhaustedError."""

    def __init__(self, path) -> None:
        self.path = Path(path)
        self.spec = f"file:{self.path}"
        bits = []
        for line in self.path.read_text(encoding="ascii").splitlines():
            bits.extend(parse_bits(line))
        self._bits = np.asarray(bits, dtype=np.uint8)

    def __len__(self) -> int:
        return len(self._bits)

    def symbol_at(self, t: int) -> Symbol:
        if t < 1:
            raise ValueError("t must be >= 1")
        if t > len(self._bits):
            raise SourceExhaustedError(
                f"source exhausted: {self.path} holds {len(self._bits)} symbols, "
                f"index {t} requested"
            )
        return int(self._bits[t - 1])

    def prefix_array(self, n: int) -> np.ndarray:
        if n > len(self._bits):
            raise SourceExhaustedError(
                f"source exhausted: {self.path} holds {len(self._bits)} symbols, "
                f"prefix {n} requested"
            )
        return self._bits[:n].copy()


class DiracPredictor(Predictor):
    """Predictor concentrated on one fixed sequence.

    Assigns probability 1 to x_t given any past of length t-1.  Off the
    support (pasts that are not prefixes of x) this is a measure-zero
    convention; it never affects losses evaluated along x itself.
    """

    def __init__(self, source: SequenceSource, _t: int = 1) -> None:
        self.source = source
        self._t = _t

    def fresh(self) -> "DiracPredictor":
        return DiracPredictor(self.source)

    def predict(self) -> tuple[float, float]:
        nxt = self.source.symbol_at(self._t)
        return (1.0, 0.0) if nxt == 0 else (0.0, 1.0)

    def observe(self, symbol: Symbol) -> None:
        validate_symbol(symbol)
        self._t += 1


def dirac_predictor(source: SequenceSource) -> DiracPredictor:
    """The deterministic-sequence predictor for ``source``."""
    return DiracPredictor(source)
