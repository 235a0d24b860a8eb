"""Prediction-quality functionals: cumulative log2 (KL) loss along a fixed
sequence, Monte-Carlo expected KL between measures, bounded absolute and
squared per-step losses with Cesaro averages, and empirical word frequencies.

A per-step loss of +inf (the predictor assigned probability zero to the
realized symbol) is recorded as the float inf sentinel; cumulative sums and
Cesaro averages containing it are themselves inf.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Predictor, SequenceSource, Word, validate_symbol

_LN2 = math.log(2.0)

CSV_COLUMNS = [
    "step", "kl_bits", "cum_kl_bits", "cesaro_kl",
    "abs", "cesaro_abs", "sq", "cesaro_sq",
]


@dataclass
class LossTrace:
    """Per-step and cumulative loss records for one predictor on one sequence.

    kl_bits[t-1] = -log2 p_t where p_t is the probability the predictor gave
    the realized symbol; abs_loss = 1 - p_t; sq_loss = 2 (1 - p_t)^2 (the
    two-point Brier score, range [0, 2]).
    """

    kl_bits: np.ndarray
    abs_loss: np.ndarray
    sq_loss: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.kl_bits)
        if not (len(self.abs_loss) == len(self.sq_loss) == n):
            raise ValueError("per-step columns must have equal length")

    def __len__(self) -> int:
        return len(self.kl_bits)

    @property
    def steps(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    @property
    def cum_kl_bits(self) -> np.ndarray:
        return np.cumsum(self.kl_bits)

    @property
    def cesaro_kl(self) -> np.ndarray:
        return self.cum_kl_bits / self.steps

    @property
    def cesaro_abs(self) -> np.ndarray:
        return np.cumsum(self.abs_loss) / self.steps

    @property
    def cesaro_sq(self) -> np.ndarray:
        return np.cumsum(self.sq_loss) / self.steps

    def liminf_proxy(self, metric: str = "kl") -> float:
        """Minimum Cesaro average over the tail window [n/2, n]: a
        monotone-safe finite-horizon upper estimate of the limit inferior."""
        cesaro = {"kl": self.cesaro_kl, "abs": self.cesaro_abs,
                  "sq": self.cesaro_sq}[metric]
        start = max(len(self) // 2, 1)
        return float(np.min(cesaro[start - 1:]))

    def rows(self):
        cum = self.cum_kl_bits
        ces_kl, ces_abs, ces_sq = self.cesaro_kl, self.cesaro_abs, self.cesaro_sq
        for i in range(len(self)):
            yield {
                "step": i + 1,
                "kl_bits": self.kl_bits[i],
                "cum_kl_bits": cum[i],
                "cesaro_kl": ces_kl[i],
                "abs": self.abs_loss[i],
                "cesaro_abs": ces_abs[i],
                "sq": self.sq_loss[i],
                "cesaro_sq": ces_sq[i],
            }

    def to_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            for row in self.rows():
                writer.writerow({k: (v if k == "step" else repr(float(v)))
                                 for k, v in row.items()})


def trace_from_realized_probs(probs) -> LossTrace:
    """Build a LossTrace from the per-step probabilities the predictor
    assigned to the realized symbols."""
    p = np.asarray(probs, dtype=np.float64)
    with np.errstate(divide="ignore"):
        kl = np.where(p > 0.0, -np.log2(np.maximum(p, 1e-323)), np.inf)
    kl = kl + 0.0  # fold -0.0 to +0.0
    miss = 1.0 - p
    return LossTrace(kl_bits=kl, abs_loss=miss, sq_loss=2.0 * miss * miss)


def realized_conditionals(x: SequenceSource, rho: Predictor, n: int) -> np.ndarray:
    """rho(x_t | x_{1..t-1}) for t = 1..n, via one incremental pass on a
    fresh instance of rho."""
    if n < 1:
        raise ValueError("horizon must be >= 1")
    pred = rho.fresh()
    out = np.empty(n, dtype=np.float64)
    for t in range(1, n + 1):
        p0, p1 = pred.predict()
        s = x.symbol_at(t)
        out[t - 1] = p1 if s else p0
        pred.observe(s)
    return out


def dirac_kl(x: SequenceSource, rho: Predictor, n: int) -> LossTrace:
    """Cumulative KL loss of rho on the deterministic sequence x.

    Because the data measure is concentrated on x, the expected per-step KL
    reduces to -log2 rho(x_t | x_{1..t-1}) and the cumulative loss equals
    -log2 rho(x_{1..n}) by the chain rule.  Steps where rho assigns x_t
    probability zero are recorded as +inf and the run continues.
    """
    return trace_from_realized_probs(realized_conditionals(x, rho, n))


def other_losses(x: SequenceSource, rho: Predictor, n: int) -> LossTrace:
    """Bounded per-step losses of rho on x: absolute loss 1 - rho(x_t | past)
    and the two-point Brier squared loss 2 (1 - rho(x_t | past))^2."""
    return trace_from_realized_probs(realized_conditionals(x, rho, n))


def _kl_term(q: float, r: float) -> float:
    """q * log2(q / r), with 0 log 0 = 0 and q > 0, r = 0 -> inf."""
    if q <= 0.0:
        return 0.0
    if r <= 0.0:
        return math.inf
    return q * math.log2(q / r)


def expected_kl(
    mu,
    rho: Predictor,
    n: int,
    num_samples: int = 100,
    seed: int = 0,
) -> tuple[float, float]:
    """Monte-Carlo estimate (value, stderr) of the expected cumulative KL
    divergence between mu- and rho-conditionals over horizon n.

    ``mu`` must expose ``fresh_predictor()`` and ``sample_trajectory(n, seed)``
    (true for both the tracking measure and Dirac sources).  Per-trajectory
    seeds are spawned deterministically from ``seed``.  For a Dirac mu every
    trajectory is the same, the estimate equals ``dirac_kl``'s cumulative
    value, and the stderr is zero.
    """
    if n < 1:
        raise ValueError("horizon must be >= 1")
    if num_samples < 1:
        raise ValueError("need at least one sample")
    child_seeds = np.random.SeedSequence(seed).generate_state(num_samples)
    totals = np.empty(num_samples, dtype=np.float64)
    for i in range(num_samples):
        y = mu.sample_trajectory(n, int(child_seeds[i]))
        mu_pred = mu.fresh_predictor()
        rho_pred = rho.fresh()
        acc = 0.0
        for t in range(n):
            q0, q1 = mu_pred.predict()
            r0, r1 = rho_pred.predict()
            acc += _kl_term(q0, r0) + _kl_term(q1, r1)
            s = int(y[t])
            mu_pred.observe(s)
            rho_pred.observe(s)
        totals[i] = acc
    if np.isinf(totals).any():
        return math.inf, math.inf
    estimate = float(np.mean(totals))
    if num_samples == 1:
        return estimate, 0.0
    stderr = float(np.std(totals, ddof=1) / math.sqrt(num_samples))
    return estimate, stderr


class DiracMeasure:
    """Measure view of a deterministic sequence, for ``expected_kl``."""

    def __init__(self, source: SequenceSource) -> None:
        self.source = source

    def fresh_predictor(self) -> Predictor:
        from .core import DiracPredictor

        return DiracPredictor(self.source)

    def sample_trajectory(self, n: int, seed: int) -> np.ndarray:
        return self.source.prefix_array(n)


def word_frequency(w: Word, seq) -> float:
    """Frequency of overlapping occurrences of w among the |seq|-|w|+1
    windows of seq."""
    w = tuple(validate_symbol(s) for s in w)
    if len(w) < 1:
        raise ValueError("pattern must be nonempty")
    seq = np.asarray(seq, dtype=np.uint8)
    if len(seq) < len(w):
        raise ValueError("sequence shorter than pattern")
    k = len(w)
    windows = len(seq) - k + 1
    hits = np.ones(windows, dtype=bool)
    for i, s in enumerate(w):
        hits &= seq[i : i + windows] == s
    return float(np.count_nonzero(hits)) / windows


def window_distribution(seq, k: int, start: int, stride: int) -> dict[Word, float]:
    """Empirical distribution of the length-k windows starting at positions
    start, start+stride, ... (1-indexed) of seq."""
    seq = np.asarray(seq, dtype=np.uint8)
    if k < 1 or start < 1 or stride < 1:
        raise ValueError("k, start and stride must be >= 1")
    counts: dict[Word, int] = {}
    total = 0
    for pos in range(start - 1, len(seq) - k + 1, stride):
        w = tuple(int(s) for s in seq[pos : pos + k])
        counts[w] = counts.get(w, 0) + 1
        total += 1
    if total == 0:
        raise ValueError("sequence too short for any window")
    return {w: c / total for w, c in counts.items()}


def stationarity_window_check(
    seq, k: int, offset_a: int, offset_b: int, stride: int = 100
) -> list[tuple[Word, float, float, float]]:
    """Compare length-k window distributions taken at two within-stride
    offsets of one trajectory.

    Returns (word, freq_a, freq_b, stderr) per word, where stderr is the
    pooled binomial standard error of the difference; under stationarity the
    differences are within a few stderr.
    """
    seq = np.asarray(seq, dtype=np.uint8)
    dist_a = window_distribution(seq, k, offset_a, stride)
    dist_b = window_distribution(seq, k, offset_b, stride)
    n_a = len(range(offset_a - 1, len(seq) - k + 1, stride))
    n_b = len(range(offset_b - 1, len(seq) - k + 1, stride))
    rows = []
    for w in sorted(set(dist_a) | set(dist_b)):
        fa = dist_a.get(w, 0.0)
        fb = dist_b.get(w, 0.0)
        pooled = (fa * n_a + fb * n_b) / (n_a + n_b)
        se = math.sqrt(max(pooled * (1.0 - pooled), 0.0) * (1.0 / n_a + 1.0 / n_b))
        rows.append((w, fa, fb, se))
    return rows


def pinsker_abs_bound(cesaro_kl_bits: float) -> float:
    """Upper bound sqrt(eps * ln 2 / 2) on the Cesaro absolute loss implied
    by a Cesaro KL of eps bits (total-variation form of Pinsker's inequality
    plus Jensen)."""
    if math.isinf(cesaro_kl_bits):
        return math.inf
    return math.sqrt(max(cesaro_kl_bits, 0.0) * _LN2 / 2.0)


def check_pinsker(trace: LossTrace, slack: float = 1e-6) -> bool:
    """Whether every horizon of the trace satisfies the Pinsker corollary
    cesaro_abs <= sqrt(cesaro_kl * ln2 / 2) + slack."""
    ces_kl = trace.cesaro_kl
    ces_abs = trace.cesaro_abs
    for t in range(len(trace)):
        if ces_abs[t] > pinsker_abs_bound(float(ces_kl[t])) + slack:
            return False
    return True
