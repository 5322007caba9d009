"""Normalized posterior model probabilities by three routes.

Exact enumeration walks every model up to the size cap.  The orthogonal-design
dynamic program factorizes each model's evidence into per-variable terms,
conditional on the error variance, and aggregates size-stratified sums with
elementary-symmetric-polynomial recurrences; the unknown-variance case
integrates the conditional factorization over a Gauss-Legendre grid in log
phi, which is exact to quadrature accuracy.  Gibbs sampling updates inclusion
indicators one at a time from their conditional odds.

All bookkeeping is in log space; probabilities are recovered by max-shifted
normalization.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import expit, logsumexp
from scipy.stats import invgamma

from .core import Dataset, ModelIndex, SufficientStats
from .coef_priors import (
    EvidenceResult,
    NormalV,
    PMOM,
    ZellnerKnownPhi,
    ZellnerUnknownPhi,
    evidence as _coef_evidence,
)
from .model_priors import SizeWeightedPrior

__all__ = [
    "EnumerationSizeError",
    "OrthogonalityError",
    "GibbsConfig",
    "ModelRecord",
    "PosteriorSummary",
    "SelectionReport",
    "SubsetMasses",
    "enumerate_posterior",
    "esp_log_sums",
    "orthogonal_dp_posterior",
    "gibbs_posterior",
    "select",
    "subset_masses",
]


class EnumerationSizeError(ValueError):
    pass


class OrthogonalityError(ValueError):
    pass


@dataclass(frozen=True)
class ModelRecord:
    model: ModelIndex
    log_evidence: float
    log_prior: float
    probability: float


@dataclass(frozen=True)
class GibbsConfig:
    sweeps: int = 10_000
    burn_in: int = 1_000
    seed: int = 0
    chains: int = 2
    rao_blackwell: bool = True
    scan: str = "systematic"

    def __post_init__(self):
        if not self.sweeps > self.burn_in >= 0:
            raise ValueError("need sweeps > burn_in >= 0")
        if self.chains < 1:
            raise ValueError("need at least one chain")
        if self.scan not in ("systematic", "random"):
            raise ValueError("scan must be systematic or random")


@dataclass(frozen=True)
class _DPState:
    # everything needed to reconstruct exact per-model and per-subset masses
    beta: np.ndarray          # (nodes, p) per-variable log factors
    log_w: np.ndarray         # (nodes,) node log weights incl. base terms
    log_size_prior: np.ndarray
    log_esp: np.ndarray       # (nodes, p_bar+1)
    log_z: float


@dataclass
class PosteriorSummary:
    method: str
    p: int
    p_bar: int
    size_probs: np.ndarray
    pips: np.ndarray
    map_model: ModelIndex
    table: tuple
    table_complete: bool
    log_normalizer: Optional[float]
    diagnostics: dict = field(default_factory=dict)
    _dp: Optional[_DPState] = None
    _index: Optional[dict] = None

    def _table_index(self) -> dict:
        if self._index is None:
            self._index = {rec.model.indices: rec for rec in self.table}
        return self._index

    def probability(self, model: ModelIndex) -> float:
        rec = self._table_index().get(model.indices)
        if rec is not None:
            return rec.probability
        if self._dp is not None:
            return math.exp(self._dp_log_prob(model))
        if self.table_complete:
            return 0.0
        if self.method == "gibbs":
            return 0.0  # never visited
        raise KeyError(f"model {model} not covered by this summary")

    def _dp_log_prob(self, model: ModelIndex) -> float:
        dp = self._dp
        if model.size > self.p_bar:
            return -math.inf
        b = dp.beta[:, list(model.indices)].sum(axis=1) if model.size else 0.0
        ev = logsumexp(dp.log_w + b)
        return ev + dp.log_size_prior[model.size] - dp.log_z

    def median_model(self, threshold: float = 0.5) -> ModelIndex:
        return ModelIndex.of(*np.flatnonzero(self.pips > threshold))

    def top_models(self, k: int = 10) -> tuple:
        return tuple(sorted(self.table, key=lambda r: -r.probability)[:k])


def _model_evidence(stats: SufficientStats, model: ModelIndex,
                    spec) -> EvidenceResult:
    if isinstance(spec, (ZellnerKnownPhi, ZellnerUnknownPhi, NormalV, PMOM)):
        return _coef_evidence(stats, model, spec)
    fn = getattr(spec, "log_evidence", None)
    if callable(fn):
        return EvidenceResult(float(fn(stats, model)))
    raise TypeError(f"unsupported coefficient prior: {type(spec).__name__}")


def _resolve_p_bar(model_spec: SizeWeightedPrior, p_bar: Optional[int]) -> int:
    if p_bar is None:
        return model_spec.p_bar
    if not 0 <= p_bar <= model_spec.p_bar:
        raise ValueError("p_bar must not exceed the model prior's support")
    return p_bar


def _tie_break_key(rec: ModelRecord):
    return (-rec.probability, rec.model.size, rec.model.indices)


def enumerate_posterior(data: Dataset | SufficientStats, coef_spec,
                        model_spec: SizeWeightedPrior,
                        p_bar: Optional[int] = None,
                        cap: int = 1 << 20) -> PosteriorSummary:
    """Exact posterior over every model of size up to p_bar."""
    stats = data if isinstance(data, SufficientStats) else SufficientStats(data)
    p = stats.p
    if model_spec.p != p:
        raise ValueError("model prior dimension does not match the data")
    p_eff = _resolve_p_bar(model_spec, p_bar)
    n_models = sum(math.comb(p, l) for l in range(p_eff + 1))
    if n_models > cap:
        raise EnumerationSizeError(
            f"{n_models} models exceed the cap {cap}; use the orthogonal "
            "dynamic program or Gibbs sampling instead")

    models, log_ev, log_pr, warns = [], [], [], 0
    for l in range(p_eff + 1):
        lp = model_spec.log_prior(l)
        for combo in itertools.combinations(range(p), l):
            m = ModelIndex(combo)
            res = _model_evidence(stats, m, coef_spec)
            models.append(m)
            log_ev.append(res.value)
            log_pr.append(lp)
            warns += res.warn
    log_ev = np.array(log_ev)
    log_pr = np.array(log_pr)
    log_un = log_ev + log_pr
    log_z = float(logsumexp(log_un))
    probs = np.exp(log_un - log_z)

    pips = np.zeros(p)
    size_probs = np.zeros(p_eff + 1)
    for m, pr in zip(models, probs):
        size_probs[m.size] += pr
        for j in m.indices:
            pips[j] += pr

    table = tuple(ModelRecord(m, e, q, pr)
                  for m, e, q, pr in zip(models, log_ev, log_pr, probs))
    map_rec = min(table, key=_tie_break_key)
    diags = {"evidence_warnings": warns} if warns else {}
    return PosteriorSummary(
        method="enumeration", p=p, p_bar=p_eff, size_probs=size_probs,
        pips=pips, map_model=map_rec.model, table=table, table_complete=True,
        log_normalizer=log_z, diagnostics=diags)


def esp_log_sums(beta: np.ndarray, p_bar: int) -> np.ndarray:
    """Log elementary symmetric sums of exp(beta) by subset size.

    beta has shape (..., p); the result has shape (..., p_bar+1) with entry l
    equal to log sum over size-l subsets of the product of the chosen
    exp(beta_j).  Size 0 is log 1 = 0.
    """
    beta = np.asarray(beta, dtype=float)
    p = beta.shape[-1]
    out = np.full(beta.shape[:-1] + (p_bar + 1,), -np.inf)
    out[..., 0] = 0.0
    top = min(p_bar, p)
    for j in range(p):
        upper = min(top, j + 1)
        out[..., 1:upper + 1] = np.logaddexp(
            out[..., 1:upper + 1],
            beta[..., j:j + 1] + out[..., 0:upper])
    return out


def _dp_variable_terms(stats: SufficientStats, spec, pmom_factorized: bool):
    """Per-variable log factors beta (nodes, p) and node log weights."""
    d = np.diag(stats.gram).copy()
    if np.any(d <= 0):
        raise OrthogonalityError("design has a zero column")
    z = stats.xty
    n, yty = stats.n, stats.yty

    if isinstance(spec, ZellnerKnownPhi):
        v = 1.0 / d
        rho = np.ones_like(d)
        phis = np.array([spec.phi])
        log_w = np.array([-0.5 * n * math.log(2 * math.pi * spec.phi)
                          - yty / (2 * spec.phi)])
        a_phi = l_phi = None
    elif isinstance(spec, (ZellnerUnknownPhi, NormalV, PMOM)):
        if isinstance(spec, NormalV):
            if isinstance(spec.v_mode, np.ndarray):
                off = spec.v_mode - np.diag(np.diag(spec.v_mode))
                if np.max(np.abs(off)) > 1e-8 * np.max(np.abs(spec.v_mode)):
                    raise OrthogonalityError(
                        "explicit V must be diagonal for the dynamic program")
                v = np.diag(spec.v_mode).copy()
            else:
                v = 1.0 / d  # zellner and diag-gram-inverse coincide here
        else:
            v = 1.0 / d
        rho = v * d
        a_phi, l_phi = spec.a_phi, spec.l_phi
        phis, log_w = None, None
    else:
        raise TypeError(f"unsupported coefficient prior: {type(spec).__name__}")

    if isinstance(spec, PMOM) and not pmom_factorized:
        raise TypeError(
            "the product-moment correction does not factorize across "
            "variables unconditionally; pass pmom_factorized=True to use the "
            "per-variable conditional form")

    tau = spec.tau
    shr = tau * v * z * z / (1.0 + tau * rho)

    if phis is None:
        # quadrature grid must cover the posterior of phi for every model:
        # residual scale ranges from the null fit down to the best p-bar fit
        s_max = l_phi + yty
        s_min = max(l_phi + yty - float(np.sort(shr)[::-1].sum()),
                    l_phi, 1e-12 * s_max)
        shape = 0.5 * (n + a_phi)
        lo = invgamma.ppf(1e-14, shape, scale=0.5 * s_min)
        hi = invgamma.isf(1e-14, shape, scale=0.5 * s_max)
        width = math.log(hi) - math.log(lo)
        nodes = int(min(192, max(64, 16 * width)))
        x, gw = np.polynomial.legendre.leggauss(nodes)
        t = 0.5 * (math.log(hi) + math.log(lo)) + 0.5 * width * x
        phis = np.exp(t)
        log_w = (np.log(gw) + math.log(0.5 * width) + t
                 + invgamma.logpdf(phis, 0.5 * a_phi, scale=0.5 * l_phi)
                 - 0.5 * n * np.log(2 * math.pi * phis)
                 - yty / (2 * phis))

    beta = (-0.5 * np.log1p(tau * rho)[None, :]
            + shr[None, :] / (2.0 * phis[:, None]))
    if isinstance(spec, PMOM):
        mult = (tau * z * z / (phis[:, None] * d * (tau + 1.0) ** 2)
                + 1.0 / (1.0 + tau))
        beta = beta + np.log(mult)
    return beta, log_w


def _dp_pips(beta: np.ndarray, log_w: np.ndarray, log_esp: np.ndarray,
             log_size_prior: np.ndarray, log_z: float) -> np.ndarray:
    """Inclusion probabilities as the exact gradient of the log normalizer
    with respect to each per-variable log factor.

    Reverses the symmetric-sum recursion: each log-add-exp step backpropagates
    softmax weights, so the sweep involves only products of nonnegative
    numbers and stays stable however extreme the factors.  Forward states are
    checkpointed every sqrt(p) variables to bound memory.
    """
    nodes, p = beta.shape
    pb1 = log_esp.shape[1]

    interval = max(1, math.isqrt(p))
    ckpt = {}
    state = np.full((nodes, pb1), -np.inf)
    state[:, 0] = 0.0
    for j in range(p):
        if j % interval == 0:
            ckpt[j] = state.copy()
        state[:, 1:] = np.logaddexp(state[:, 1:],
                                    beta[:, j][:, None] + state[:, :-1])

    # d logZ / d state at the output; unreachable cells carry zero weight
    grad = np.exp(log_w[:, None] + log_size_prior[None, :] + state - log_z)
    pips = np.zeros(p)
    for start in range(((p - 1) // interval) * interval, -1, -interval):
        end = min(start + interval, p)
        pre = []
        seg = ckpt[start].copy()
        for j in range(start, end):
            pre.append(seg.copy())
            seg[:, 1:] = np.logaddexp(seg[:, 1:],
                                      beta[:, j][:, None] + seg[:, :-1])
        post = seg
        for j in range(end - 1, start - 1, -1):
            s_pre = pre[j - start]
            unreachable = np.isneginf(post)
            with np.errstate(invalid="ignore"):
                w_keep = np.where(unreachable, 0.0, np.exp(s_pre - post))
                w_add = np.where(
                    unreachable[:, 1:], 0.0,
                    np.exp(beta[:, j][:, None] + s_pre[:, :-1] - post[:, 1:]))
            pips[j] = float(np.sum(grad[:, 1:] * w_add))
            new_grad = grad * w_keep
            new_grad[:, :-1] += grad[:, 1:] * w_add
            grad = new_grad
            post = s_pre
    return np.clip(pips, 0.0, 1.0)


def orthogonal_dp_posterior(data: Dataset | SufficientStats, coef_spec,
                            model_spec: SizeWeightedPrior,
                            p_bar: Optional[int] = None, *,
                            pmom_factorized: bool = False,
                            materialize_limit: int = 16) -> PosteriorSummary:
    """Exact posterior summaries on a design with orthogonal columns."""
    stats = data if isinstance(data, SufficientStats) else SufficientStats(data)
    p = stats.p
    if model_spec.p != p:
        raise ValueError("model prior dimension does not match the data")
    p_eff = _resolve_p_bar(model_spec, p_bar)

    g = stats.gram
    d = np.diag(g)
    scale = np.sqrt(np.outer(d, d))
    off = np.abs(g - np.diag(d))
    if np.any(d <= 0) or np.max(off / np.where(scale > 0, scale, 1.0)) > 1e-8:
        raise OrthogonalityError("X'X is not diagonal to tolerance 1e-8")

    beta, log_w = _dp_variable_terms(stats, coef_spec, pmom_factorized)
    log_esp = esp_log_sums(beta, p_eff)

    log_size_prior = np.array([model_spec.log_prior(l) for l in range(p_eff + 1)])
    log_size_num = log_size_prior + logsumexp(log_w[:, None] + log_esp, axis=0)
    log_z = float(logsumexp(log_size_num))
    size_probs = np.exp(log_size_num - log_z)

    pips = _dp_pips(beta, log_w, log_esp, log_size_prior, log_z)
    dp = _DPState(beta=beta, log_w=log_w, log_size_prior=log_size_prior,
                  log_esp=log_esp, log_z=log_z)

    summary = PosteriorSummary(
        method="orthogonal-dp", p=p, p_bar=p_eff, size_probs=size_probs,
        pips=pips, map_model=ModelIndex(()), table=(), table_complete=False,
        log_normalizer=log_z, _dp=dp)

    if sum(math.comb(p, l) for l in range(p_eff + 1)) <= (1 << materialize_limit):
        models = [ModelIndex(c) for l in range(p_eff + 1)
                  for c in itertools.combinations(range(p), l)]
        mask = np.zeros((len(models), p))
        for i, m in enumerate(models):
            mask[i, list(m.indices)] = 1.0
        evs = logsumexp(log_w[None, :] + mask @ beta.T, axis=1)
        records = [
            ModelRecord(m, float(ev), float(log_size_prior[m.size]),
                        math.exp(ev + log_size_prior[m.size] - log_z))
            for m, ev in zip(models, evs)
        ]
        summary.table = tuple(records)
        summary.table_complete = True
        summary.map_model = min(records, key=_tie_break_key).model
    else:
        # nested family ranked by inclusion probability; evidences are exact
        order = np.argsort(-pips)
        best, records = None, []
        for l in range(p_eff + 1):
            m = ModelIndex.of(*sorted(order[:l]))
            b = beta[:, sorted(order[:l])].sum(axis=1) if l else np.zeros_like(log_w)
            ev = float(logsumexp(log_w + b))
            lp = float(log_size_prior[l])
            pr = math.exp(ev + lp - log_z)
            rec = ModelRecord(m, ev, lp, pr)
            records.append(rec)
            if best is None or _tie_break_key(rec) < _tie_break_key(best):
                best = rec
        summary.table = tuple(records)
        summary.map_model = best.model
    return summary


def gibbs_posterior(data: Dataset | SufficientStats, coef_spec,
                    model_spec: SizeWeightedPrior,
                    p_bar: Optional[int] = None,
                    cfg: GibbsConfig = GibbsConfig()) -> PosteriorSummary:
    """Posterior estimates from variable-at-a-time Gibbs sampling."""
    stats = data if isinstance(data, SufficientStats) else SufficientStats(data)
    p = stats.p
    if model_spec.p != p:
        raise ValueError("model prior dimension does not match the data")
    p_eff = _resolve_p_bar(model_spec, p_bar)

    ev_cache: dict = {}

    def log_ev(key: tuple) -> float:
        val = ev_cache.get(key)
        if val is None:
            val = _model_evidence(stats, ModelIndex(key), coef_spec).value
            ev_cache[key] = val
        return val

    size_odds = [model_spec.log_prior_odds(l + 1, l) for l in range(p_eff)]
    keep = cfg.sweeps - cfg.burn_in
    chain_pips = np.zeros((cfg.chains, p))
    half_gap = np.zeros(cfg.chains)
    visits: dict = {}

    for chain in range(cfg.chains):
        rng = np.random.default_rng((cfg.seed, chain))
        current: tuple = ()
        rb_first = np.zeros(p)
        rb_second = np.zeros(p)
        freq = np.zeros(p)
        for sweep in range(cfg.sweeps):
            order = (range(p) if cfg.scan == "systematic"
                     else rng.permutation(p))
            for j in order:
                included = j in current
                without = tuple(i for i in current if i != j) if included else current
                if not included and len(current) >= p_eff:
                    p_inc = 0.0  # add-move blocked at the size boundary
                else:
                    with_j = tuple(sorted(without + (j,)))
                    lo = (log_ev(with_j) - log_ev(without)
                          + size_odds[len(without)])
                    p_inc = float(expit(lo))
                take = rng.random() < p_inc
                current = tuple(sorted(without + (j,))) if take else without
                if sweep >= cfg.burn_in:
                    half = rb_first if sweep - cfg.burn_in < keep // 2 else rb_second
                    half[j] += p_inc
                    freq[j] += take
            if sweep >= cfg.burn_in:
                visits[current] = visits.get(current, 0) + 1
        n1 = keep // 2
        n2 = keep - n1
        rb = (rb_first + rb_second) / keep
        half_gap[chain] = np.max(np.abs(rb_first / max(n1, 1)
                                        - rb_second / max(n2, 1)))
        chain_pips[chain] = rb if cfg.rao_blackwell else freq / keep

    pips = chain_pips.mean(axis=0)
    total = keep * cfg.chains
    size_probs = np.zeros(p_eff + 1)
    records = []
    for key, count in visits.items():
        m = ModelIndex(key)
        pr = count / total
        size_probs[m.size] += pr
        records.append(ModelRecord(m, log_ev(key),
                                   float(model_spec.log_prior(m.size)), pr))
    table = tuple(records)
    map_rec = min(table, key=_tie_break_key)
    diags = {
        "chain_pips": chain_pips,
        "split_half_max_gap": half_gap,
        "across_chain_max_gap": float(np.max(np.ptp(chain_pips, axis=0)))
        if cfg.chains > 1 else 0.0,
        "visited_models": len(visits),
        "evidence_evaluations": len(ev_cache),
    }
    return PosteriorSummary(
        method="gibbs", p=p, p_bar=p_eff, size_probs=size_probs, pips=pips,
        map_model=map_rec.model, table=table, table_complete=False,
        log_normalizer=None, diagnostics=diags)


@dataclass(frozen=True)
class SelectionReport:
    rule: str
    threshold: Optional[float]
    chosen: ModelIndex
    prob_chosen: Optional[float]
    reference: Optional[ModelIndex]
    prob_reference: Optional[float]
    mismatch_bound: Optional[float]


def select(summary: PosteriorSummary, rule: str = "map",
           threshold: float = 0.5,
           reference: Optional[ModelIndex] = None):
    """Pick a model by posterior mode or by thresholding inclusion
    probabilities; the report carries the mode-mismatch bound ingredients
    2(1 - p(reference|y)) when a reference is supplied."""
    if rule == "map":
        chosen = summary.map_model
        thr = None
    elif rule == "median":
        chosen = summary.median_model(threshold)
        thr = threshold
    else:
        raise ValueError("rule must be 'map' or 'median'")
    try:
        prob_chosen = summary.probability(chosen)
    except KeyError:
        prob_chosen = None
    prob_ref = bound = None
    if reference is not None:
        try:
            prob_ref = summary.probability(reference)
            bound = 2.0 * (1.0 - prob_ref)
        except KeyError:
            pass
    return chosen, SelectionReport(rule=rule, threshold=thr, chosen=chosen,
                                   prob_chosen=prob_chosen, reference=reference,
                                   prob_reference=prob_ref,
                                   mismatch_bound=bound)


@dataclass(frozen=True)
class SubsetMasses:
    """Posterior mass by size, split into supersets of the reference and the
    rest.  sigma[l] covers strict supersets of size l; sigma_tilde[l] covers
    every other size-l model except the reference itself."""

    reference: ModelIndex
    prob_reference: float
    sigma: np.ndarray
    sigma_tilde: np.ndarray


def subset_masses(summary: PosteriorSummary,
                  reference: ModelIndex) -> SubsetMasses:
    p_bar = summary.p_bar
    if reference.size > p_bar:
        raise ValueError("reference model exceeds the size cap")
    sigma = np.zeros(p_bar + 1)
    sigma_tilde = np.zeros(p_bar + 1)

    if summary._dp is not None:
        dp = summary._dp
        idx = list(reference.indices)
        forced = dp.beta[:, idx].sum(axis=1) if idx else np.zeros_like(dp.log_w)
        rest = np.delete(dp.beta, idx, axis=1)
        esp_rest = esp_log_sums(rest, p_bar - reference.size)
        prob_ref = math.exp(summary._dp_log_prob(reference))
        for l in range(reference.size, p_bar + 1):
            log_sup = (dp.log_size_prior[l]
                       + logsumexp(dp.log_w + forced + esp_rest[:, l - reference.size]))
            sup = math.exp(log_sup - dp.log_z)
            if l > reference.size:
                sigma[l] = sup
                sigma_tilde[l] = max(summary.size_probs[l] - sup, 0.0)
            else:
                sigma_tilde[l] = max(summary.size_probs[l] - prob_ref, 0.0)
        sigma_tilde[:reference.size] = summary.size_probs[:reference.size]
        return SubsetMasses(reference, prob_ref, sigma, sigma_tilde)

    prob_ref = 0.0
    for rec in summary.table:
        m = rec.model
        if m.indices == reference.indices:
            prob_ref = rec.probability
            continue
        if m.size > reference.size and m.contains(reference):
            sigma[m.size] += rec.probability
        else:
            sigma_tilde[m.size] += rec.probability
    return SubsetMasses(reference, prob_ref, sigma, sigma_tilde)
