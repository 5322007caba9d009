"""L0 penalties, maximized Gaussian likelihoods and the normalized criterion.

The normalized criterion exponentiates each model's maximized log likelihood
minus its penalty and renormalizes over a supplied model universe, so it can
stand in for a posterior distribution in the selection machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import softmax

from .core import ModelIndex, SufficientStats
from .model_priors import log_binom

__all__ = [
    "BIC",
    "EBIC",
    "RIC",
    "CustomEta",
    "L0Spec",
    "InterpolationError",
    "penalty",
    "log_h",
    "normalized_l0",
    "make_criterion",
]


class InterpolationError(ValueError):
    """A model fits the response exactly; the plug-in likelihood diverges."""


@dataclass(frozen=True)
class BIC:
    pass


@dataclass(frozen=True)
class EBIC:
    xi: float = 1.0

    def __post_init__(self):
        if not 0 < self.xi <= 1:
            raise ValueError("xi must lie in (0, 1]")


@dataclass(frozen=True)
class RIC:
    pass


@dataclass(frozen=True)
class CustomEta:
    """Arbitrary penalty eta(p_m, n, p); the caller owns monotonicity."""

    fn: Callable[[int, int, int], float]


L0Spec = Union[BIC, EBIC, RIC, CustomEta]


def penalty(model: ModelIndex | int, n: int, p: int, spec: L0Spec) -> float:
    size = model.size if isinstance(model, ModelIndex) else int(model)
    if size < 0 or size > p:
        raise ValueError("model size must lie in [0, p]")
    if n <= 1:
        raise ValueError("n must exceed 1")
    if isinstance(spec, BIC):
        return 0.5 * size * math.log(n)
    if isinstance(spec, EBIC):
        return 0.5 * size * math.log(n) + spec.xi * log_binom(p, size)
    if isinstance(spec, RIC):
        return size * math.log(p)
    if isinstance(spec, CustomEta):
        return float(spec.fn(size, n, p))
    raise TypeError(f"unsupported criterion: {type(spec).__name__}")


def log_h(stats: SufficientStats, model: ModelIndex, spec: L0Spec) -> float:
    """Maximized Gaussian log likelihood minus the penalty."""
    s_m = stats.fit(model).rss if model.size else stats.yty
    # rounding-level residuals mean the plug-in variance is meaningless
    if s_m <= 1e-12 * max(stats.yty, 1.0):
        raise InterpolationError(f"model {model} interpolates the response")
    n = stats.n
    return (-0.5 * n * (math.log(2.0 * math.pi * s_m / n) + 1.0)
            - penalty(model, n, stats.p, spec))


def normalized_l0(stats: SufficientStats, models: Sequence[ModelIndex],
                  spec: L0Spec) -> np.ndarray:
    if len(models) == 0:
        raise ValueError("need at least one model")
    vals = np.array([log_h(stats, m, spec) for m in models])
    return softmax(vals)


def make_criterion(text: str) -> L0Spec:
    """Parse a CLI-style criterion name: bic, ric, ebic, or ebic:<xi>."""
    key = text.strip().lower()
    if key == "bic":
        return BIC()
    if key == "ric":
        return RIC()
    if key == "ebic":
        return EBIC()
    if key.startswith("ebic:"):
        return EBIC(xi=float(key.split(":", 1)[1]))
    raise ValueError(f"unknown criterion: {text!r}")
