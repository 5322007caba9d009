"""Size-aggregated bounds on expected posterior mass across the model space.

Per-model posterior-probability bounds compose into three global sums: mass
on spurious supersets of the true model, mass on models smaller than the
truth, and mass on non-spurious models at least as large. Each sum collapses
over model sizes with binomial counts, so evaluation is O(p_bar) even when
the model space itself is astronomically large. Everything here accumulates
in log space; raw values can exceed 1 (the sums bound probabilities only
once they are small), so results carry both the raw value and a clamped
reading for reports.

The module also evaluates closed-form simplified rates per model-prior
family, signal floors derived from design projections, and preset
bound-versus-sample-size curves.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .core import Dataset, ModelIndex
from .l0 import L0Spec, penalty
from .model_priors import ComplexityPrior, SizeWeightedPrior, log_binom

__all__ = [
    "BoundScenario",
    "BoundValue",
    "bound_spurious",
    "bound_nonspurious_small",
    "bound_nonspurious_large",
    "bound_l0",
    "RateEntry",
    "SimplifiedRates",
    "simplified_rates",
    "FloorRow",
    "FloorReport",
    "lambda_floor",
    "CurveRow",
    "scenario_for_case",
    "bound_curves",
    "write_curve_csv",
]


@dataclass(frozen=True)
class BoundValue:
    """A nonnegative bound kept in log space.

    `raw` may exceed 1 (or overflow to inf); `clamped` is the probability-
    scale reading used in reports and plots.
    """

    log_raw: float

    @property
    def raw(self) -> float:
        return float(np.exp(self.log_raw))

    @property
    def clamped(self) -> float:
        return min(self.raw, 1.0)

    def __float__(self) -> float:
        return self.raw


def _lse(log_terms: Sequence[float]) -> float:
    if not log_terms:
        return -math.inf
    return float(logsumexp(np.asarray(log_terms, dtype=float)))


@dataclass(frozen=True)
class BoundScenario:
    """Inputs for the global sums: problem sizes, prior, and signal floors.

    `lam_small` is the floor entering the sum over models smaller than the
    truth (scaled by how many active variables a model misses); `lam_large`
    enters the sums over models at least as large. `alpha` discounts the
    per-model bounds, `alpha_prime < alpha` discounts the floors, and
    `gamma` only affects the asymptotic-rate diagnostics. Optional
    `lambda_overrides` maps a size l < p_t to a floor replacing `lam_small`
    for that size's term.
    """

    n: int
    p: int
    p_bar: int
    p_t: int
    tau: float
    model_prior: SizeWeightedPrior
    lam_small: float
    lam_large: float
    alpha: float = 0.99
    alpha_prime: float = 0.95
    gamma: float = 0.95
    lambda_overrides: Mapping[int, float] | None = None

    def __post_init__(self) -> None:
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be positive")
        if not 0 <= self.p_t <= self.p_bar <= min(self.n, self.p):
            raise ValueError("need 0 <= p_t <= p_bar <= min(n, p)")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not (self.lam_small > 0 and self.lam_large > 0):
            raise ValueError("signal floors must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 < self.alpha_prime < self.alpha:
            raise ValueError("alpha_prime must lie in (0, alpha)")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.model_prior.p != self.p:
            raise ValueError("model prior is for a different number of variables")
        if self.model_prior.p_bar < self.p_bar:
            raise ValueError("model prior truncates below the scenario's p_bar")
        if self.lambda_overrides is not None:
            for size, lam in self.lambda_overrides.items():
                if not 0 <= size < self.p_t:
                    raise ValueError("floor overrides apply to sizes below p_t only")
                if not lam > 0:
                    raise ValueError("floor overrides must be positive")

    def _log_r(self, size: int) -> float:
        return self.model_prior.log_prior_odds(size, self.p_t)

    def _floor_small(self, size: int) -> float:
        if self.lambda_overrides is not None and size in self.lambda_overrides:
            return self.lambda_overrides[size]
        return self.lam_small


def bound_spurious(sc: BoundScenario) -> BoundValue:
    """Expected posterior mass on strict supersets of the true model.

    Sums, over sizes l in (p_t, p_bar], the count of spurious size-l models
    times the size-based per-model envelope r^alpha / tau^(alpha (l-p_t)/2).
    """
    half_log_tau = 0.5 * math.log(sc.tau)
    logs = []
    for l in range(sc.p_t + 1, sc.p_bar + 1):
        k = l - sc.p_t
        logs.append(log_binom(sc.p - sc.p_t, k)
                    + sc.alpha * (sc._log_r(l) - k * half_log_tau))
    return BoundValue(_lse(logs))


def bound_nonspurious_small(sc: BoundScenario) -> BoundValue:
    """Expected posterior mass on models strictly smaller than the truth.

    Each size-l term pairs the full count of size-l models with the
    reciprocal prior-dispersion envelope and the signal decay
    exp(-lam^alpha_prime (p_t - l)/2) for the p_t - l missed variables.
    """
    half_log_tau = 0.5 * math.log(sc.tau)
    logs = []
    for l in range(sc.p_t):
        miss = sc.p_t - l
        decay = 0.5 * sc._floor_small(l) ** sc.alpha_prime * miss
        logs.append(log_binom(sc.p, l)
                    - sc.alpha * (sc._log_r(l) + miss * half_log_tau)
                    - decay)
    return BoundValue(_lse(logs))


def bound_nonspurious_large(sc: BoundScenario) -> BoundValue:
    """Expected posterior mass on non-spurious models of size >= p_t.

    The size-p_t term counts all size-p_t models (a deliberate overcount by
    the true model itself) with the undiscounted decay exp(-lam/2). Larger
    sizes split by overlap j < p_t with the truth, each overlap class
    decaying with the number of missed active variables.
    """
    half_log_tau = 0.5 * math.log(sc.tau)
    decay = 0.5 * sc.lam_large ** sc.alpha_prime
    logs = [log_binom(sc.p, sc.p_t) - 0.5 * sc.lam_large]
    for l in range(sc.p_t + 1, sc.p_bar + 1):
        k = l - sc.p_t
        inner = [log_binom(sc.p_t, j) + log_binom(sc.p - sc.p_t, l - j)
                 - decay * (sc.p_t - j)
                 for j in range(sc.p_t) if l - j <= sc.p - sc.p_t]
        if not inner:
            continue
        logs.append(sc.alpha * (sc._log_r(l) - k * half_log_tau) + _lse(inner))
    return BoundValue(_lse(logs))


def bound_l0(sc: BoundScenario, spec: L0Spec) -> tuple[BoundValue, BoundValue, BoundValue]:
    """The three global sums for normalized L0 criteria.

    The prior-dispersion envelope is replaced by exp(-alpha (eta_l - eta_t))
    in every sum, where eta is the criterion's penalty at each size; the
    counting and signal-decay structure is unchanged. Returns (spurious,
    smaller-than-truth, at-least-truth-sized) bounds.
    """
    eta_t = penalty(sc.p_t, sc.n, sc.p, spec)

    def gap(l: int) -> float:
        return sc.alpha * (penalty(l, sc.n, sc.p, spec) - eta_t)

    spur = [log_binom(sc.p - sc.p_t, l - sc.p_t) - gap(l)
            for l in range(sc.p_t + 1, sc.p_bar + 1)]

    small = [log_binom(sc.p, l) - gap(l)
             - 0.5 * sc._floor_small(l) ** sc.alpha_prime * (sc.p_t - l)
             for l in range(sc.p_t)]

    decay = 0.5 * sc.lam_large ** sc.alpha_prime
    large = [log_binom(sc.p, sc.p_t) - 0.5 * sc.lam_large]
    for l in range(sc.p_t + 1, sc.p_bar + 1):
        inner = [log_binom(sc.p_t, j) + log_binom(sc.p - sc.p_t, l - j)
                 - decay * (sc.p_t - j)
                 for j in range(sc.p_t) if l - j <= sc.p - sc.p_t]
        if inner:
            large.append(-gap(l) + _lse(inner))

    return BoundValue(_lse(spur)), BoundValue(_lse(small)), BoundValue(_lse(large))


# ---------------------------------------------------------------------------
# simplified closed-form rates


@dataclass(frozen=True)
class RateEntry:
    """One closed-form rate: its value, a flag for the printed side
    condition, and whether the expression is a certified finite-sample
    upper bound (as opposed to an asymptotic order)."""

    value: float
    log_value: float
    applicable: bool
    certified: bool
    note: str = ""


@dataclass(frozen=True)
class SimplifiedRates:
    uniform_geometric: RateEntry
    beta_binomial: RateEntry
    complexity_leading: RateEntry
    complexity_generating: RateEntry
    zellner_known_phi: RateEntry
    zellner_unknown_phi: RateEntry
    nonspurious_small_rate: RateEntry
    nonspurious_large_rate: RateEntry


def _log_abs_one_minus_exp(a: float) -> float:
    """log|1 - e^a|, stable for a of either sign."""
    if a == 0.0:
        return -math.inf
    if a > 0:
        return a + math.log1p(-math.exp(-a))
    return math.log1p(-math.exp(a))


def _geometric_log_sum(log_x: float, terms: int) -> float:
    """log of x + x^2 + ... + x^terms via the closed form."""
    if terms == 0:
        return -math.inf
    if log_x == 0.0:
        return math.log(terms)
    return log_x + _log_abs_one_minus_exp(terms * log_x) - _log_abs_one_minus_exp(log_x)


def _series_entry(log_base: float, p_t: int, certified: bool, note: str) -> RateEntry:
    # sum_{k>=1} C(p_t+k, k) b^k = (1-b)^(-p_t-1) - 1, valid only for b < 1
    if log_base >= 0.0:
        return RateEntry(math.inf, math.inf, False, certified,
                         note + "; series base is not below 1")
    b = math.exp(log_base)
    value = math.expm1(-(p_t + 1) * math.log1p(-b))
    return RateEntry(value, math.log(value) if value > 0 else -math.inf,
                     True, certified, note)


def simplified_rates(sc: BoundScenario, *, c: float | None = None,
                     refine_exponent: float = 1.0) -> SimplifiedRates:
    """Closed-form spurious-mass rates per prior family, plus asymptotic
    diagnostics for the non-spurious sums.

    All families are evaluated at the scenario's finite values regardless of
    `sc.model_prior`; `c` defaults to the scenario prior's complexity
    exponent when it has one, else 1. Entries flagged `certified` are true
    finite-sample upper bounds for the corresponding exact sum; the rest
    give the asymptotic order with constants suppressed (`refine_exponent`
    is the free exponent in the prior-dispersion refinement, tight near 1).
    """
    if c is None:
        c = sc.model_prior.c if isinstance(sc.model_prior, ComplexityPrior) else 1.0
    p, p_t, p_bar = sc.p, sc.p_t, sc.p_bar
    excess = p - p_t
    log_tau = math.log(sc.tau)
    half_alpha_log_tau = 0.5 * sc.alpha * log_tau

    if excess == 0:
        uniform = RateEntry(0.0, -math.inf, True, True, "no spurious sizes")
    else:
        log_x = math.log(excess) - half_alpha_log_tau
        log_val = _geometric_log_sum(log_x, p_bar - p_t)
        uniform = RateEntry(float(np.exp(log_val)), log_val, True, True,
                            "finite geometric sum")

    log_b_flat = (1.0 - sc.alpha) * math.log(max(excess, 1)) - half_alpha_log_tau
    beta_binomial = _series_entry(log_b_flat, p_t, True, "generating-function series")

    log_lead = (math.log(p_t + 1) + (1.0 - sc.alpha) * math.log(max(excess, 1))
                - 0.5 * sc.alpha * log_tau - c * math.log(p))
    complexity_leading = RateEntry(float(np.exp(log_lead)), log_lead, True, False,
                                   "leading asymptotic order")
    log_b_c = log_b_flat - c * sc.alpha * math.log(p)
    complexity_generating = _series_entry(log_b_c, p_t, True,
                                          "generating-function series")

    # prior-dispersion refinements for Zellner evidences; order-level only
    log_arg = 0.5 * log_tau + math.log(max(excess, 1))
    log_known = (math.log(p_t + 1)
                 + 0.5 * refine_exponent * math.log(max(p_bar - p_t, 1))
                 + 1.5 * math.log(max(log_arg, 1e-300)) - 0.5 * log_tau)
    zellner_known = RateEntry(float(np.exp(log_known)), log_known,
                              log_arg > 1.0, False, "asymptotic order")
    if sc.n > p_bar and excess > 0 and log_arg > 1.0:
        log_unknown = (math.log(p_t + 1) - 0.5 * log_tau
                       + 2.0 * log_arg ** 1.5 * math.sqrt(excess / (sc.n - p_bar)))
        zellner_unknown = RateEntry(float(np.exp(log_unknown)), log_unknown,
                                    True, False, "asymptotic order")
    else:
        zellner_unknown = RateEntry(math.inf, math.inf, False, False,
                                    "needs n > p_bar and tau^(1/2)(p - p_t) > e")

    log_small = -0.5 * sc.gamma * sc.lam_small ** sc.alpha_prime \
        + (p_t - 1) * math.log(p)
    nonspur_small = RateEntry(float(np.exp(log_small)), log_small, True, False,
                              "asymptotic order")
    if p_t >= 1 and excess >= 1:
        large_ok = 0.5 * sc.gamma * sc.lam_large ** sc.alpha_prime > math.log(p / p_t)
        log_large = -0.5 * sc.gamma * sc.lam_large ** sc.alpha_prime \
            + (p_bar - p_t + 1) * math.log(excess)
        nonspur_large = RateEntry(float(np.exp(log_large)), log_large,
                                  large_ok, False, "asymptotic order")
    else:
        nonspur_large = RateEntry(math.nan, math.nan, False, False,
                                  "degenerate sizes")

    return SimplifiedRates(uniform, beta_binomial, complexity_leading,
                           complexity_generating, zellner_known,
                           zellner_unknown, nonspur_small, nonspur_large)


# ---------------------------------------------------------------------------
# signal floors from design projections


@dataclass(frozen=True)
class FloorRow:
    """Certificate for one small model: the projection residual's rank and
    smallest nonzero eigenvalue, the implied floor, and the exact
    noncentrality it bounds."""

    model: ModelIndex
    eigen_min: float
    rank: int
    floor: float
    noncentrality: float
    holds: bool


@dataclass(frozen=True)
class FloorReport:
    rows: tuple[FloorRow, ...]
    # min over rows of eigen_min * min_j theta_j^2 / phi: a floor valid for
    # every scanned model after dividing the noncentrality by its deficit
    overall: float


def lambda_floor(data: Dataset, t: ModelIndex | None = None, *,
                 scan: Sequence[ModelIndex] | None = None) -> FloorReport:
    """Per-model noncentrality floors from the design's projection geometry.

    For each scanned model m smaller than the true model t, the quadratic
    form X_t'(I - H_m)X_t yields rank q and smallest nonzero eigenvalue v,
    and the noncentrality separating t from m is at least
    v * q * min_j theta_j^2 / phi. The minimum runs over nonzero true
    coefficients only, so with literal zeros in theta the floor is a
    diagnostic rather than a guarantee; each row's `holds` records the
    verification. The default scan enumerates every proper submodel of t.
    """
    if data.truth is None:
        raise ValueError("dataset carries no truth")
    truth = data.truth
    if truth.mean_design is not None:
        raise ValueError("floors need an exactly specified linear truth")
    if t is None:
        t = truth.model
    elif t != truth.model:
        raise ValueError("reference model must be the dataset's truth")
    p_t = t.size
    if p_t == 0:
        raise ValueError("the true model has no variables to floor")
    if scan is None:
        if p_t > 12:
            raise ValueError("default scan enumerates 2^p_t submodels; "
                             "pass an explicit scan for p_t > 12")
        scan = [ModelIndex.of(*combo)
                for size in range(p_t)
                for combo in itertools.combinations(t.indices, size)]

    theta = np.asarray(truth.theta, dtype=float)
    active = theta[theta != 0.0]
    min_signal = float(np.min(active ** 2)) if active.size else 0.0
    X_t = data.X[:, list(t.indices)]
    mu = X_t @ theta

    rows = []
    overall = math.inf
    for m in scan:
        if m.size >= p_t:
            raise ValueError("scan models must be smaller than the reference")
        if m.size:
            Q, _ = np.linalg.qr(data.X[:, list(m.indices)])
            resid = X_t - Q @ (Q.T @ X_t)
            mu_resid = mu - Q @ (Q.T @ mu)
        else:
            resid, mu_resid = X_t, mu
        svals = np.linalg.svd(resid, compute_uv=False)
        tol = max(data.n, p_t) * np.finfo(float).eps * (svals[0] if svals.size else 0.0)
        nonzero = svals[svals > tol]
        rank = int(nonzero.size)
        v = float(nonzero[-1] ** 2) if rank else 0.0
        floor = v * rank * min_signal / truth.phi
        lam = float(mu_resid @ mu_resid) / truth.phi
        holds = lam >= floor * (1.0 - 1e-9) - 1e-12
        rows.append(FloorRow(m, v, rank, floor, lam, holds))
        overall = min(overall, v * min_signal / truth.phi)

    return FloorReport(tuple(rows), overall)


# ---------------------------------------------------------------------------
# preset bound-versus-n curves

# case -> (p grows as n^2, true size, per-variable signal)
_CURVE_CASES = {1: (False, 5, 0.5), 2: (True, 10, 0.5),
                3: (False, 5, 0.25), 4: (True, 10, 0.25)}


def scenario_for_case(case: int, n: int, *, lambda_rule: str = "theta-squared-n",
                      alpha: float = 0.99, alpha_prime: float = 0.95,
                      c: float = 1.0) -> BoundScenario:
    """Scenario for one preset curve case at sample size n.

    Cases 1 and 3 set p = n; cases 2 and 4 set p = n^2 with a denser truth.
    Cases 3-4 halve the per-variable signal. Under `theta-squared-n` the
    floors are n theta^2 (unit error variance); `quarter-n` uses the cruder
    readings n/2 and n/4. The prior is complexity-type and tau = n.
    """
    if case not in _CURVE_CASES:
        raise ValueError("case must be one of 1, 2, 3, 4")
    quadratic, p_t, theta = _CURVE_CASES[case]
    if n <= p_t:
        raise ValueError("n must exceed the case's true model size")
    p = n * n if quadratic else n
    if lambda_rule == "theta-squared-n":
        lam = n * theta ** 2
    elif lambda_rule == "quarter-n":
        lam = n * (0.5 if theta == 0.5 else 0.25)
    else:
        raise ValueError("lambda_rule must be theta-squared-n or quarter-n")
    prior = ComplexityPrior(p, n, c)
    return BoundScenario(n=n, p=p, p_bar=n, p_t=p_t, tau=float(n),
                         model_prior=prior, lam_small=lam, lam_large=lam,
                         alpha=alpha, alpha_prime=alpha_prime)


@dataclass(frozen=True)
class CurveRow:
    n: int
    spurious: float
    nonspurious_small: float
    raw_spurious: float
    raw_nonspurious_small: float
    log10_spurious: float
    log10_nonspurious_small: float
    spurious_clamped: bool
    nonspurious_small_clamped: bool


def bound_curves(case: int, n_grid: Sequence[int], *,
                 lambda_rule: str = "theta-squared-n", alpha: float = 0.99,
                 alpha_prime: float = 0.95, c: float = 1.0) -> list[CurveRow]:
    """Spurious and smaller-than-truth bounds across a sample-size grid."""
    rows = []
    for n in n_grid:
        sc = scenario_for_case(case, int(n), lambda_rule=lambda_rule,
                               alpha=alpha, alpha_prime=alpha_prime, c=c)
        spur = bound_spurious(sc)
        small = bound_nonspurious_small(sc)
        rows.append(CurveRow(
            n=int(n),
            spurious=spur.clamped,
            nonspurious_small=small.clamped,
            raw_spurious=spur.raw,
            raw_nonspurious_small=small.raw,
            log10_spurious=spur.log_raw / math.log(10.0),
            log10_nonspurious_small=small.log_raw / math.log(10.0),
            spurious_clamped=spur.raw > 1.0,
            nonspurious_small_clamped=small.raw > 1.0,
        ))
    return rows


def write_curve_csv(rows: Sequence[CurveRow], path: str | Path) -> None:
    fields = ["n", "spurious", "nonspurious_small", "raw_spurious",
              "raw_nonspurious_small", "log10_spurious",
              "log10_nonspurious_small", "spurious_clamped",
              "nonspurious_small_clamped"]
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for row in rows:
            writer.writerow([getattr(row, f) for f in fields])
