"""Reference predictors: uniform coin, the Krichevsky-Trofimov add-half
estimator, and a Bayesian mixture of finite-order context estimators.

All of them derive one conditional coordinate as the complement of the other,
so the pair sums to 1 exactly and min(p0, p1) <= 1/2 holds in floating point.
"""

from __future__ import annotations

import math
from collections import defaultdict

import numpy as np

from .core import Predictor, Symbol, Word, validate_symbol

MAX_MIXTURE_ORDER = 16


class UniformPredictor(Predictor):
    """P(0) = P(1) = 1/2 for every past."""

    def fresh(self) -> "UniformPredictor":
        return UniformPredictor()

    def predict(self) -> tuple[float, float]:
        return (0.5, 0.5)

    def observe(self, symbol: Symbol) -> None:
        validate_symbol(symbol)

    def conditional(self, past: Word) -> tuple[float, float]:
        return (0.5, 0.5)


def uniform_predictor() -> UniformPredictor:
    return UniformPredictor()


class KTPredictor(Predictor):
    """Krichevsky-Trofimov add-half estimator:
    P(next=1 | past) = (n1 + 1/2) / (n0 + n1 + 1)."""

    def __init__(self) -> None:
        self.counts = [0, 0]

    def fresh(self) -> "KTPredictor":
        return KTPredictor()

    def predict(self) -> tuple[float, float]:
        n0, n1 = self.counts
        p1 = (n1 + 0.5) / (n0 + n1 + 1)
        return (1.0 - p1, p1)

    def observe(self, symbol: Symbol) -> None:
        self.counts[validate_symbol(symbol)] += 1

    def conditional(self, past: Word) -> tuple[float, float]:
        # direct formula from the past's counts; must agree with replay
        n1 = sum(validate_symbol(s) for s in past)
        p1 = (n1 + 0.5) / (len(past) + 1)
        return (1.0 - p1, p1)


def kt_predictor() -> KTPredictor:
    return KTPredictor()


class _ContextKT:
    """Order-k KT component: per-context add-half counts with log2 joint.

    For pasts shorter than k the context is the entire available past, so the
    component is a proper measure from the first symbol on.
    """

    def __init__(self, order: int) -> None:
        self.order = order
        self.counts: dict[Word, list[int]] = defaultdict(lambda: [0, 0])
        self.recent: list[int] = []  # last <= order symbols
        self.log2_joint = 0.0

    def _context(self) -> Word:
        return tuple(self.recent)

    def predict1(self) -> float:
        n0, n1 = self.counts[self._context()]
        return (n1 + 0.5) / (n0 + n1 + 1)

    def observe(self, symbol: int) -> None:
        p1 = self.predict1()
        self.log2_joint += math.log2(p1 if symbol else 1.0 - p1)
        self.counts[self._context()][symbol] += 1
        self.recent.append(symbol)
        if len(self.recent) > self.order:
            self.recent.pop(0)


class FiniteOrderMixture(Predictor):
    """Bayesian mixture of order-0..K context KT estimators.

    The mixture joint is sum_k w_k mu_k(y); conditionals are ratios of
    consecutive joints, i.e. posterior-weighted component conditionals.  The
    joint therefore dominates every component: cumulative mixture loss never
    exceeds a component's cumulative loss plus -log2 w_k.
    """

    def __init__(self, max_order: int, weights=None) -> None:
        if max_order < 0:
            raise ValueError("max_order must be >= 0")
        if max_order > MAX_MIXTURE_ORDER:
            raise ValueError(
                f"max_order {max_order} refused: context tables explode past "
                f"{MAX_MIXTURE_ORDER}"
            )
        if weights is None:
            raw = [2.0 ** (-k) for k in range(max_order + 1)]
        else:
            raw = [float(w) for w in weights]
            if len(raw) != max_order + 1:
                raise ValueError("need one weight per order 0..K")
            if any(w <= 0.0 for w in raw):
                raise ValueError("weights must be positive")
        total = math.fsum(raw)
        self.max_order = max_order
        self.log2_weights = [math.log2(w / total) for w in raw]
        self.components = [_ContextKT(k) for k in range(max_order + 1)]

    def fresh(self) -> "FiniteOrderMixture":
        m = FiniteOrderMixture(self.max_order)
        m.log2_weights = list(self.log2_weights)
        m.components = [_ContextKT(k) for k in range(self.max_order + 1)]
        return m

    def _posterior(self) -> np.ndarray:
        a = np.array(
            [lw + c.log2_joint for lw, c in zip(self.log2_weights, self.components)]
        )
        a -= a.max()
        g = np.exp2(a)
        return g / g.sum()

    def predict(self) -> tuple[float, float]:
        post = self._posterior()
        p1 = float(np.dot(post, [c.predict1() for c in self.components]))
        p1 = min(max(p1, 0.0), 1.0)
        return (1.0 - p1, p1)

    def observe(self, symbol: Symbol) -> None:
        validate_symbol(symbol)
        for c in self.components:
            c.observe(symbol)

    def log2_joint(self) -> float:
        """log2 of the mixture probability of the observed past."""
        a = np.array(
            [lw + c.log2_joint for lw, c in zip(self.log2_weights, self.components)]
        )
        m = float(a.max())
        return m + math.log2(float(np.exp2(a - m).sum()))


def finite_order_mixture(max_order: int, weights=None) -> FiniteOrderMixture:
    return FiniteOrderMixture(max_order, weights)
