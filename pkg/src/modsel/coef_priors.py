"""Log marginal likelihoods and Bayes factors for the supported coefficient priors.

Deterministic variants (Zellner with known or unknown error variance, Normal
with a general scale matrix) reduce to per-model log evidences; Bayes factors
are plain differences, so antisymmetry and chain consistency are exact.  The
product-moment prior adds a posterior-expectation factor per model that is
estimated by seeded Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import linalg
from scipy.special import logsumexp

from .core import ModelIndex, SufficientStats, _chol_with_jitter, _v_matrix

__all__ = [
    "ZellnerKnownPhi",
    "ZellnerUnknownPhi",
    "NormalV",
    "PMOM",
    "CoefPrior",
    "EvidenceError",
    "EvidenceResult",
    "PmomEstimate",
    "FstatBoundReport",
    "log_evidence",
    "shrunken_rss",
    "pmom_evidence",
    "evidence",
    "log_bf_zellner_known",
    "log_bf_zellner_unknown",
    "log_bf_normal_v",
    "log_bf_pmom",
    "fstat_bayes_bound_check",
    "tau_preset",
]


class EvidenceError(RuntimeError):
    """Numeric failure while computing a model's marginal likelihood."""


def _check_tau(tau: float) -> None:
    if not tau > 0:
        raise ValueError("tau must be positive")


def _check_ig(a_phi: float, l_phi: float) -> None:
    if not (a_phi > 0 and l_phi > 0):
        raise ValueError("a_phi and l_phi must be positive")


@dataclass(frozen=True)
class ZellnerKnownPhi:
    tau: float
    phi: float

    def __post_init__(self):
        _check_tau(self.tau)
        if not self.phi > 0:
            raise ValueError("phi must be positive")


@dataclass(frozen=True)
class ZellnerUnknownPhi:
    tau: float
    a_phi: float = 0.01
    l_phi: float = 0.01

    def __post_init__(self):
        _check_tau(self.tau)
        _check_ig(self.a_phi, self.l_phi)


@dataclass(frozen=True)
class NormalV:
    """Normal prior N(0, tau * phi * V_k) with V_k chosen per v_mode.

    v_mode "zellner" uses (X_k'X_k)^{-1}; "diag-gram-inverse" the inverse of
    the Gram diagonal; an explicit (p, p) array is subset to each model's
    columns.
    """

    tau: float
    v_mode: Union[str, np.ndarray] = "diag-gram-inverse"
    a_phi: float = 0.01
    l_phi: float = 0.01

    def __post_init__(self):
        _check_tau(self.tau)
        _check_ig(self.a_phi, self.l_phi)

    # ndarray field breaks generated __eq__/__hash__; identity is fine here
    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)


@dataclass(frozen=True)
class PMOM:
    """Product second-moment prior; evidence carries a Monte Carlo factor.

    The quadratic form uses V_k = diag(X_k'X_k)^{-1}, under which the prior
    is exactly normalized for standardized columns.
    """

    tau: float
    a_phi: float = 0.01
    l_phi: float = 0.01
    mc_draws: int = 2000
    seed: int = 0

    def __post_init__(self):
        _check_tau(self.tau)
        _check_ig(self.a_phi, self.l_phi)
        if self.mc_draws < 100:
            raise ValueError("mc_draws must be at least 100")


CoefPrior = Union[ZellnerKnownPhi, ZellnerUnknownPhi, NormalV, PMOM]


def tau_preset(name: str, n: int | None = None, p: int | None = None) -> float:
    """Named dispersion defaults: unit-information n, ric p^2,
    benchmark max(n, p^2), pmom 0.348 n."""
    key = name.lower().replace("-", "").replace("_", "")
    if key == "unitinformation":
        if n is None:
            raise ValueError("unit-information preset needs n")
        return float(n)
    if key == "ric":
        if p is None:
            raise ValueError("ric preset needs p")
        return float(p) ** 2
    if key == "benchmark":
        if n is None or p is None:
            raise ValueError("benchmark preset needs n and p")
        return float(max(n, p * p))
    if key == "pmom":
        if n is None:
            raise ValueError("pmom preset needs n")
        return 0.348 * n
    raise ValueError(f"unknown tau preset: {name!r}")


def _sub_v_mode(spec_mode: Union[str, np.ndarray], model: ModelIndex,
                p: int) -> Union[str, np.ndarray]:
    if isinstance(spec_mode, str):
        return spec_mode
    v = np.asarray(spec_mode, dtype=float)
    if v.shape != (p, p):
        raise ValueError("explicit V must be a (p, p) matrix over all columns")
    idx = list(model.indices)
    return v[np.ix_(idx, idx)]


def _shrunk_fit(stats: SufficientStats, model: ModelIndex, tau: float,
                v_mode: Union[str, np.ndarray]):
    """Returns (shrunk explained sum of squares, log det(I + tau V G),
    posterior mean, Cholesky factor of B = G + V^{-1}/tau)."""
    if model.size == 0:
        return 0.0, 0.0, np.zeros(0), np.zeros((0, 0))
    g = stats.gram_sub(model)
    xty = stats.xty_sub(model)
    try:
        if isinstance(v_mode, str) and v_mode == "zellner":
            fit = stats.fit(model)
            shrunk = tau / (1.0 + tau) * fit.explained
            logdet = model.size * math.log1p(tau)
            b_chol = fit.chol * math.sqrt(1.0 + 1.0 / tau)
            mean = tau / (1.0 + tau) * fit.theta
            return shrunk, logdet, mean, b_chol
        mode = _sub_v_mode(v_mode, model, stats.p)
        _, rho = _v_matrix(mode, g)
        if isinstance(mode, str):  # diag-gram-inverse
            v_inv = np.diag(np.diag(g))
        else:
            v_inv = linalg.cho_solve((linalg.cholesky(mode, lower=True), True),
                                     np.eye(model.size))
        b = g + v_inv / tau
        b_chol, _ = _chol_with_jitter(b)
        mean = linalg.cho_solve((b_chol, True), xty)
        shrunk = float(xty @ mean)
        logdet = float(np.sum(np.log1p(tau * rho)))
        return shrunk, logdet, mean, b_chol
    except (np.linalg.LinAlgError, linalg.LinAlgError) as exc:
        raise EvidenceError(f"evidence failed for model {model}: {exc}") from exc


def _log_evidence_known(stats: SufficientStats, model: ModelIndex,
                        spec: ZellnerKnownPhi) -> float:
    shrunk, logdet, _, _ = _shrunk_fit(stats, model, spec.tau, "zellner")
    quad = stats.yty - shrunk
    n = stats.n
    return (-0.5 * n * math.log(2.0 * math.pi * spec.phi) - 0.5 * logdet
            - quad / (2.0 * spec.phi))


def _log_evidence_ig(stats: SufficientStats, model: ModelIndex, tau: float,
                     v_mode, a_phi: float, l_phi: float) -> float:
    shrunk, logdet, _, _ = _shrunk_fit(stats, model, tau, v_mode)
    s_tilde = l_phi + stats.yty - shrunk
    assert s_tilde > 0, "shrunken residual sum must stay positive"
    n = stats.n
    return (-0.5 * n * math.log(2.0 * math.pi)
            + 0.5 * a_phi * math.log(0.5 * l_phi) - math.lgamma(0.5 * a_phi)
            + math.lgamma(0.5 * (n + a_phi))
            - 0.5 * (n + a_phi) * math.log(0.5 * s_tilde)
            - 0.5 * logdet)


def log_evidence(stats: SufficientStats, model: ModelIndex,
                 spec: CoefPrior) -> float:
    """Log marginal likelihood of one model under a deterministic prior."""
    if isinstance(spec, ZellnerKnownPhi):
        return _log_evidence_known(stats, model, spec)
    if isinstance(spec, ZellnerUnknownPhi):
        return _log_evidence_ig(stats, model, spec.tau, "zellner",
                                spec.a_phi, spec.l_phi)
    if isinstance(spec, NormalV):
        return _log_evidence_ig(stats, model, spec.tau, spec.v_mode,
                                spec.a_phi, spec.l_phi)
    if isinstance(spec, PMOM):
        raise TypeError("PMOM evidence is stochastic; use pmom_evidence")
    raise TypeError(f"unsupported prior spec: {type(spec).__name__}")


def shrunken_rss(stats: SufficientStats, model: ModelIndex,
                 spec: CoefPrior) -> float:
    """l_phi + y'y minus the shrunken explained sum under the spec's V."""
    if isinstance(spec, ZellnerKnownPhi):
        raise TypeError("the known-variance prior has no inverse-gamma term")
    v_mode = spec.v_mode if isinstance(spec, NormalV) else (
        "diag-gram-inverse" if isinstance(spec, PMOM) else "zellner")
    shrunk, _, _, _ = _shrunk_fit(stats, model, spec.tau, v_mode)
    return spec.l_phi + stats.yty - shrunk


@dataclass(frozen=True)
class PmomEstimate:
    """Monte Carlo log estimate with a delta-method standard error.

    warn flags estimates whose weight mean sits within roughly ten standard
    errors of zero, where the log transform is no longer trustworthy.
    """

    value: float
    mc_se: float
    warn: bool

    def __iter__(self):
        return iter((self.value, self.mc_se))


def _pmom_correction(stats: SufficientStats, model: ModelIndex,
                     spec: PMOM) -> PmomEstimate:
    if model.size == 0:
        return PmomEstimate(0.0, 0.0, False)
    shrunk, _, mean, b_chol = _shrunk_fit(stats, model, spec.tau,
                                          "diag-gram-inverse")
    s_tilde = spec.l_phi + stats.yty - shrunk
    shape = 0.5 * (stats.n + spec.a_phi)
    rng = np.random.default_rng((spec.seed,) + model.indices)
    phi = (0.5 * s_tilde) / rng.gamma(shape, size=spec.mc_draws)
    z = rng.standard_normal((spec.mc_draws, model.size))
    theta = mean + np.sqrt(phi)[:, None] * (z @ linalg.solve_triangular(
        b_chol, np.eye(model.size), lower=True))
    d = np.diag(stats.gram_sub(model))
    with np.errstate(divide="ignore"):
        log_w = (np.sum(np.log(theta * theta * d), axis=1)
                 - model.size * (math.log(spec.tau) + np.log(phi)))
    s = spec.mc_draws
    m1 = logsumexp(log_w) - math.log(s)
    m2 = logsumexp(2.0 * log_w) - math.log(s)
    rel_var = max(math.expm1(m2 - 2.0 * m1), 0.0)
    se = math.sqrt(rel_var / s)
    return PmomEstimate(float(m1), se, se > 0.1)


def pmom_evidence(stats: SufficientStats, model: ModelIndex,
                  spec: PMOM) -> PmomEstimate:
    base = _log_evidence_ig(stats, model, spec.tau, "diag-gram-inverse",
                            spec.a_phi, spec.l_phi)
    corr = _pmom_correction(stats, model, spec)
    return PmomEstimate(base + corr.value, corr.mc_se, corr.warn)


@dataclass(frozen=True)
class EvidenceResult:
    value: float
    mc_se: float = 0.0
    warn: bool = False


def evidence(stats: SufficientStats, model: ModelIndex,
             spec: CoefPrior) -> EvidenceResult:
    """Uniform interface over deterministic and Monte Carlo evidences."""
    if isinstance(spec, PMOM):
        est = pmom_evidence(stats, model, spec)
        return EvidenceResult(est.value, est.mc_se, est.warn)
    return EvidenceResult(log_evidence(stats, model, spec))


def log_bf_zellner_known(stats: SufficientStats, t: ModelIndex, m: ModelIndex,
                         spec: ZellnerKnownPhi) -> float:
    if not isinstance(spec, ZellnerKnownPhi):
        raise TypeError("spec must be ZellnerKnownPhi")
    return _log_evidence_known(stats, t, spec) - _log_evidence_known(stats, m, spec)


def log_bf_zellner_unknown(stats: SufficientStats, t: ModelIndex,
                           m: ModelIndex, spec: ZellnerUnknownPhi) -> float:
    if not isinstance(spec, ZellnerUnknownPhi):
        raise TypeError("spec must be ZellnerUnknownPhi")
    return (log_evidence(stats, t, spec) - log_evidence(stats, m, spec))


def log_bf_normal_v(stats: SufficientStats, t: ModelIndex, m: ModelIndex,
                    spec: NormalV) -> float:
    if not isinstance(spec, NormalV):
        raise TypeError("spec must be NormalV")
    return (log_evidence(stats, t, spec) - log_evidence(stats, m, spec))


def log_bf_pmom(stats: SufficientStats, t: ModelIndex, m: ModelIndex,
                spec: PMOM) -> PmomEstimate:
    if not isinstance(spec, PMOM):
        raise TypeError("spec must be PMOM")
    et = pmom_evidence(stats, t, spec)
    em = pmom_evidence(stats, m, spec)
    se = math.hypot(et.mc_se, em.mc_se)
    return PmomEstimate(et.value - em.value, se, et.warn or em.warn)


@dataclass(frozen=True)
class FstatBoundReport:
    """Both sides of the shrunken-residual ratio bound and of the
    shrunken-F decomposition, with pass flags.

    ratio_upper is the bound with the inverse-gamma location l_phi dropped;
    ratio_upper_adjusted adds the exact l_phi/s_t slack, which is the form the
    argument actually establishes.  The dropped term is not negligible: the
    bound is near-tight, so the unadjusted form fails by O(l_phi/s_t) on a
    majority of routine instances.  Consumers wanting a guarantee should test
    ratio_holds_adjusted.  decomp_* fields are None when the competing model
    is not larger than the reference.
    """

    s_t: float
    s_tilde_t: float
    ratio: float
    ratio_upper: float
    ratio_upper_adjusted: float
    ratio_holds: bool
    ratio_holds_adjusted: bool
    rho: float
    decomp_lhs: float | None
    decomp_rhs: float | None
    decomp_holds: bool | None


def fstat_bayes_bound_check(stats: SufficientStats, t: ModelIndex,
                            m: ModelIndex, spec: NormalV) -> FstatBoundReport:
    if not isinstance(spec, NormalV):
        raise TypeError("spec must be NormalV")
    tau, l_phi = spec.tau, spec.l_phi
    s0 = stats.yty
    s_t = stats.fit(t).rss if t.size else s0
    shrunk_t, _, _, _ = _shrunk_fit(stats, t, tau, spec.v_mode)
    s_tilde_t = l_phi + stats.yty - shrunk_t

    if t.size:
        g = stats.gram_sub(t)
        _, rho_eigs = _v_matrix(_sub_v_mode(spec.v_mode, t, stats.p), g)
        rho = float(np.min(rho_eigs))
    else:
        rho = math.inf  # no shrinkage directions: ratio slack vanishes

    ratio = s_tilde_t / s_t
    slack = (s0 - s_t) / (s_t * (1.0 + tau * rho)) if math.isfinite(rho) else 0.0
    upper = 1.0 + slack
    upper_adj = upper + l_phi / s_t
    tol = 1e-9 * max(1.0, abs(upper))

    decomp_lhs = decomp_rhs = decomp_holds = None
    if m.size > t.size:
        if stats.n <= m.size:
            raise ValueError("decomposition needs n > size of the larger model")
        s_m = stats.fit(m).rss
        shrunk_m, _, _, _ = _shrunk_fit(stats, m, tau, spec.v_mode)
        s_tilde_m = l_phi + stats.yty - shrunk_m
        scale = stats.n - m.size
        decomp_lhs = (s_tilde_t - s_tilde_m) * scale / s_tilde_m
        a = tau * rho / (1.0 + tau * rho) if math.isfinite(rho) else 1.0
        b = 1.0 / (1.0 + tau * rho) if math.isfinite(rho) else 0.0
        decomp_rhs = (a * (s_t - s_m) * scale / s_m
                      + b * (s0 - s_m) * scale / s_m)
        decomp_holds = decomp_lhs <= decomp_rhs + 1e-9 * max(1.0, abs(decomp_rhs))

    return FstatBoundReport(
        s_t=s_t, s_tilde_t=s_tilde_t, ratio=ratio, ratio_upper=upper,
        ratio_upper_adjusted=upper_adj,
        ratio_holds=1.0 - 1e-12 <= ratio <= upper + tol,
        ratio_holds_adjusted=1.0 - 1e-12 <= ratio <= upper_adj + tol,
        rho=rho, decomp_lhs=decomp_lhs, decomp_rhs=decomp_rhs,
        decomp_holds=decomp_holds,
    )
