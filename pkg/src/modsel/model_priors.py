"""Priors over model space that depend on a model only through its size.

Every prior here assigns equal mass to models of the same size and zero mass
to models with more than ``p_bar`` variables.  That symmetry is what makes
the prior-odds ratio between two models a pure function of their sizes, which
the bound and posterior machinery relies on throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .core import ModelIndex

__all__ = [
    "SizeWeightedPrior",
    "UniformPrior",
    "BetaBinomialPrior",
    "ComplexityPrior",
    "CustomSizeWeightsPrior",
    "SizeRow",
    "ConsistencyReport",
    "consistency_diagnostics",
    "make_prior",
]

ModelOrSize = Union[ModelIndex, int]


def _size_of(m: ModelOrSize) -> int:
    if isinstance(m, ModelIndex):
        return m.size
    size = int(m)
    if size < 0:
        raise ValueError("model size must be nonnegative")
    return size


def log_binom(n: int, k: int) -> float:
    if k < 0 or k > n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


@dataclass(frozen=True)
class SizeWeightedPrior:
    """Base class: subclasses supply an unnormalized log mass per size."""

    p: int
    p_bar: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if not 0 <= self.p_bar <= self.p:
            raise ValueError("p_bar must lie in [0, p]")

    def log_size_mass(self, size: int) -> float:
        """Unnormalized log prior mass of the event {model has `size` variables}."""
        raise NotImplementedError

    @cached_property
    def _log_normalizer(self) -> float:
        masses = [self.log_size_mass(l) for l in range(self.p_bar + 1)]
        top = max(masses)
        return top + math.log(math.fsum(math.exp(v - top) for v in masses))

    def log_prior(self, model: ModelOrSize) -> float:
        """Log prior mass of one model; -inf when its size exceeds p_bar."""
        size = _size_of(model)
        if size > self.p_bar:
            return -math.inf
        return self.log_size_mass(size) - log_binom(self.p, size) - self._log_normalizer

    def log_prior_odds(self, m: ModelOrSize, t: ModelOrSize) -> float:
        """log of p(model m)/p(model t); depends only on the two sizes."""
        sm, st = _size_of(m), _size_of(t)
        if sm == st:
            return 0.0
        lm = self.log_size_mass(sm) - log_binom(self.p, sm) if sm <= self.p_bar else -math.inf
        lt = self.log_size_mass(st) - log_binom(self.p, st) if st <= self.p_bar else -math.inf
        return lm - lt


@dataclass(frozen=True)
class UniformPrior(SizeWeightedPrior):
    """Equal mass on every model of size up to p_bar; all prior odds are 1."""

    def log_size_mass(self, size: int) -> float:
        return log_binom(self.p, size)


@dataclass(frozen=True)
class BetaBinomialPrior(SizeWeightedPrior):
    """Beta-Binomial(1,1): uniform over sizes 0..p_bar, uniform within size."""

    def log_size_mass(self, size: int) -> float:
        return 0.0


@dataclass(frozen=True)
class ComplexityPrior(SizeWeightedPrior):
    """Size mass proportional to p^(-c * size); heavier penalty for larger c."""

    c: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not self.c > 0:
            raise ValueError("complexity exponent c must be positive")

    def log_size_mass(self, size: int) -> float:
        return -self.c * size * math.log(self.p)


@dataclass(frozen=True)
class CustomSizeWeightsPrior(SizeWeightedPrior):
    """Arbitrary positive weights w_0..w_p_bar on sizes, uniform within size."""

    weights: tuple = field(default=())

    def __post_init__(self):
        super().__post_init__()
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.p_bar + 1,):
            raise ValueError("need exactly p_bar + 1 size weights")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("size weights must be positive and finite")

    def log_size_mass(self, size: int) -> float:
        return math.log(self.weights[size])


def make_prior(kind: str, p: int, p_bar: int, *, c: float = 1.0,
               weights: Sequence[float] = ()) -> SizeWeightedPrior:
    kind = kind.lower().replace("-", "").replace("_", "")
    if kind == "uniform":
        return UniformPrior(p, p_bar)
    if kind in ("betabinomial", "betabinomial11", "bb"):
        return BetaBinomialPrior(p, p_bar)
    if kind == "complexity":
        return ComplexityPrior(p, p_bar, c)
    if kind in ("custom", "customsizeweights"):
        return CustomSizeWeightsPrior(p, p_bar, tuple(float(w) for w in weights))
    raise ValueError(f"unknown model prior kind: {kind!r}")


@dataclass(frozen=True)
class SizeRow:
    """Finite-n consistency quantities for one competing model size.

    ``c1_ratio`` is r / tau^(beta2 * (size - p_t)/2): pairwise consistency
    against larger models wants this small.  ``c2_margin`` is
    log r - lambda^beta3 - (size - p_t) log(1 + tau): consistency against any
    fixed competitor wants this very negative.  ``tau_threshold`` and
    ``lambda_threshold`` restate the sufficient conditions: tau should greatly
    exceed the former (sizes >= p_t), lambda^beta3 the latter (sizes < p_t).
    Thresholds are None when no closed form applies to the prior at hand.
    """

    size: int
    log_odds: float
    c1_ratio: float
    c2_margin: float
    tau_threshold: float | None
    lambda_threshold: float | None


@dataclass(frozen=True)
class ConsistencyReport:
    prior: SizeWeightedPrior
    tau: float
    p_t: int
    lam: float
    beta2: float
    beta3: float
    rows: tuple

    def row(self, size: int) -> SizeRow:
        return self.rows[size]


def _tau_threshold(prior: SizeWeightedPrior, p_t: int, beta2: float) -> float | None:
    if isinstance(prior, (UniformPrior, ComplexityPrior)):
        return 1.0
    if isinstance(prior, BetaBinomialPrior):
        if prior.p == p_t:
            return None
        return (prior.p_bar / (prior.p - p_t)) ** (2.0 / beta2)
    return None


def _lambda_threshold(prior: SizeWeightedPrior, size: int, p_t: int,
                      tau: float) -> float | None:
    gap = p_t - size
    if isinstance(prior, UniformPrior):
        return gap * math.log(tau)
    if size == 0 or prior.p == p_t:
        return None
    if isinstance(prior, BetaBinomialPrior):
        return gap * math.log((prior.p - p_t) * tau / size)
    if isinstance(prior, ComplexityPrior):
        return gap * math.log(prior.p ** prior.c * (prior.p - p_t) * tau / size)
    return None


def consistency_diagnostics(prior: SizeWeightedPrior, tau: float, p_t: int,
                            lam: float, beta2: float = 0.5,
                            beta3: float = 0.5) -> ConsistencyReport:
    """Tabulate, per competing size, how far the prior is from the
    pairwise-consistency conditions at the given (tau, lambda).

    Purely diagnostic: the report states quantities and sufficient-condition
    thresholds, it does not declare a verdict.
    """
    if tau <= 0 or lam <= 0:
        raise ValueError("tau and lambda must be positive")
    if not (0 < beta2 < 1 and 0 < beta3 < 1):
        raise ValueError("beta2 and beta3 must lie in (0, 1)")
    if not 0 <= p_t <= prior.p_bar:
        raise ValueError("p_t must lie in [0, p_bar]")

    rows = []
    for size in range(prior.p_bar + 1):
        log_r = prior.log_prior_odds(size, p_t)
        nu = size - p_t
        c1 = math.exp(log_r - beta2 * nu / 2.0 * math.log(tau))
        c2 = log_r - lam ** beta3 - nu * math.log1p(tau)
        rows.append(SizeRow(
            size=size,
            log_odds=log_r,
            c1_ratio=c1,
            c2_margin=c2,
            tau_threshold=_tau_threshold(prior, p_t, beta2) if size >= p_t else None,
            lambda_threshold=_lambda_threshold(prior, size, p_t, tau) if size < p_t else None,
        ))
    return ConsistencyReport(prior=prior, tau=tau, p_t=p_t, lam=lam,
                             beta2=beta2, beta3=beta3, rows=tuple(rows))
