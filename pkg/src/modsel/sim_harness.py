"""Scenario-driven simulation studies with reproducible substreams.

A `Scenario` fixes the data-generating mechanism (design recipe, true
coefficients, error variance), an engine, and a list of prior bundles; `run`
executes every replicate under every bundle, digesting each posterior into
the quantities the studies track: the truth's posterior probability, mass on
spurious and non-spurious models, inclusion probabilities, and selection
outcomes. Aggregates carry Monte Carlo standard errors plus empirical checks
of the selection-error inequalities (mode and median misselection against
twice the expected complementary truth mass, and per-variable inclusion
errors against threshold-scaled expected inclusion probabilities). Those
inequalities hold replicate-wise, so a violation indicates a bug rather
than bad luck.

Randomness is counter-based: stream [seed, replicate, purpose] for data
generation and [seed, replicate, purpose, bundle] for engine noise, so
adding bundles never perturbs the generated data.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .coef_priors import PMOM, ZellnerKnownPhi, ZellnerUnknownPhi
from .core import Dataset, ModelIndex, Truth
from .model_priors import SizeWeightedPrior, make_prior
from .posterior import (
    GibbsConfig,
    PosteriorSummary,
    enumerate_posterior,
    gibbs_posterior,
    orthogonal_dp_posterior,
    subset_masses,
)

__all__ = [
    "Orthogonal",
    "Equicorrelated",
    "CustomMatrix",
    "MisspecifiedMean",
    "Heteroskedastic",
    "Bundle",
    "Scenario",
    "ReplicateDigest",
    "InequalityCheck",
    "BundleAggregate",
    "RunResult",
    "SweepRow",
    "standard_bundles",
    "generate",
    "run",
    "emit",
    "run_size_sweep",
    "write_sweep_csv",
    "orthogonal_study_scenario",
    "correlated_study_scenario",
]

_GEN_STREAM = 0
_ENGINE_STREAM = 1


@dataclass(frozen=True)
class Orthogonal:
    """Zero-mean orthonormal columns scaled so every column has squared
    norm n (needs p < n; otherwise generation falls back to independent
    standardized Gaussian columns with a warning)."""


@dataclass(frozen=True)
class Equicorrelated:
    rho: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")


@dataclass(frozen=True)
class CustomMatrix:
    """Fixed design loaded from `path` (.npy or delimited text); only the
    noise is redrawn across replicates."""

    path: str


@dataclass(frozen=True)
class MisspecifiedMean:
    """The response mean includes unrecorded columns: the fitted design has
    p columns but the truth adds `omitted` coefficients on extra columns
    drawn jointly with the recorded ones."""

    omitted: tuple[float, ...]
    rho: float = 0.0

    def __post_init__(self) -> None:
        if len(self.omitted) == 0:
            raise ValueError("need at least one omitted coefficient")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")


@dataclass(frozen=True)
class Heteroskedastic:
    """Correlated covariates with a non-identity error covariance: recipe
    `variance-ramp` scales error variances linearly from 1 to `param`;
    `ar1` uses corr(eps_i, eps_j) = param^|i-j|."""

    recipe: str = "variance-ramp"
    param: float = 3.0
    rho: float = 0.0

    def __post_init__(self) -> None:
        if self.recipe not in ("variance-ramp", "ar1"):
            raise ValueError("recipe must be variance-ramp or ar1")
        if self.recipe == "variance-ramp" and not self.param > 0:
            raise ValueError("ramp top variance must be positive")
        if self.recipe == "ar1" and not 0.0 <= self.param < 1.0:
            raise ValueError("ar1 coefficient must lie in [0, 1)")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")


DesignSpec = Union[Orthogonal, Equicorrelated, CustomMatrix,
                   MisspecifiedMean, Heteroskedastic]


@dataclass(frozen=True)
class Bundle:
    """A coefficient prior paired with a model prior, with tau resolved per
    sample size: `unit-information` means tau = n, `pmom-default` the unit
    prior variance scaling 0.348 n."""

    name: str
    coef: str = "zellner"
    model: str = "betabinomial"
    tau: Union[float, str] = "unit-information"
    c: float = 1.0
    a_phi: float = 0.01
    l_phi: float = 0.01
    phi_known: float = 1.0
    mc_draws: int = 2000

    def __post_init__(self) -> None:
        if self.coef not in ("zellner", "zellner-known", "pmom"):
            raise ValueError("coef prior must be zellner, zellner-known or pmom")
        if isinstance(self.tau, str) and self.tau not in ("unit-information",
                                                          "pmom-default"):
            raise ValueError("tau rule must be unit-information or pmom-default")

    def resolve_tau(self, n: int) -> float:
        if self.tau == "unit-information":
            return float(n)
        if self.tau == "pmom-default":
            return 0.348 * n
        return float(self.tau)

    def build(self, n: int, p: int, p_bar: int, engine_seed: int):
        tau = self.resolve_tau(n)
        if self.coef == "zellner":
            coef_spec = ZellnerUnknownPhi(tau, self.a_phi, self.l_phi)
        elif self.coef == "zellner-known":
            coef_spec = ZellnerKnownPhi(tau, self.phi_known)
        else:
            coef_spec = PMOM(tau, self.a_phi, self.l_phi,
                             mc_draws=self.mc_draws, seed=engine_seed)
        return coef_spec, make_prior(self.model, p=p, p_bar=p_bar, c=self.c)


def standard_bundles() -> tuple[Bundle, ...]:
    """The three combinations tracked throughout the simulation studies."""
    return (
        Bundle("zellner-complexity", coef="zellner", model="complexity", c=1.0),
        Bundle("zellner-betabinomial", coef="zellner", model="betabinomial"),
        Bundle("pmom-betabinomial", coef="pmom", model="betabinomial",
               tau="pmom-default"),
    )


@dataclass(frozen=True)
class Scenario:
    design: DesignSpec
    n: int
    p: int
    coef: tuple[float, ...]
    phi: float = 1.0
    bundles: tuple[Bundle, ...] = ()
    replicates: int = 20
    seed: int = 0
    engine: str = "enumerate"
    p_bar: Optional[int] = None
    threshold: float = 0.5
    gibbs_sweeps: int = 10_000
    gibbs_burn_in: int = 1_000
    gibbs_chains: int = 1

    def __post_init__(self) -> None:
        if self.n < 2 or self.p < 1:
            raise ValueError("need n >= 2 and p >= 1")
        if len(self.coef) > self.p:
            raise ValueError("coefficient pattern longer than the design")
        if self.replicates < 1:
            raise ValueError("need at least one replicate")
        if self.engine not in ("enumerate", "ortho-dp", "gibbs"):
            raise ValueError("engine must be enumerate, ortho-dp or gibbs")
        if not self.phi >= 0:
            raise ValueError("phi must be nonnegative")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if self.resolved_p_bar() < self.p_t:
            raise ValueError("size cap falls below the true model size")

    @property
    def p_t(self) -> int:
        return len(self.coef)

    def resolved_p_bar(self) -> int:
        # leave a few residual degrees of freedom for unknown-phi evidences
        cap = self.p_bar if self.p_bar is not None else min(self.n - 5, self.p)
        return min(cap, self.p)

    def truth_model(self) -> ModelIndex:
        return ModelIndex(tuple(range(self.p_t)))


def _standardize(X: np.ndarray) -> np.ndarray:
    X = X - X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return X / sd


def _correlated_block(rng: np.random.Generator, n: int, width: int,
                      rho: float) -> np.ndarray:
    Z = rng.standard_normal((n, width))
    if rho == 0.0 or width == 1:
        return Z
    C = np.full((width, width), rho)
    np.fill_diagonal(C, 1.0)
    return Z @ np.linalg.cholesky(C).T


def generate(scenario: Scenario, replicate_index: int) -> Dataset:
    """One replicate's dataset, deterministic in (seed, replicate_index).

    With phi = 0 the response is the exact mean (a determinism stub) and no
    truth is attached, since a degenerate error law has no valid variance.
    """
    sc = scenario
    rng = np.random.default_rng([sc.seed, replicate_index, _GEN_STREAM])
    design = sc.design
    theta = np.asarray(sc.coef, dtype=float)
    sigma = None
    mean_design = mean_coef = None

    if isinstance(design, Orthogonal):
        # centering consumes one degree of freedom, hence p < n needed
        if sc.p >= sc.n:
            warnings.warn("cannot orthonormalize p >= n columns; using "
                          "independent standardized Gaussian columns")
            X = _standardize(rng.standard_normal((sc.n, sc.p)))
        else:
            Z = rng.standard_normal((sc.n, sc.p))
            Q, _ = np.linalg.qr(Z - Z.mean(axis=0))
            X = Q * math.sqrt(sc.n)
    elif isinstance(design, Equicorrelated):
        X = _standardize(_correlated_block(rng, sc.n, sc.p, design.rho))
    elif isinstance(design, CustomMatrix):
        path = Path(design.path)
        X = np.load(path) if path.suffix == ".npy" else np.loadtxt(path, delimiter=",")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape != (sc.n, sc.p):
            raise ValueError(f"matrix file has shape {X.shape}, "
                             f"expected {(sc.n, sc.p)}")
    elif isinstance(design, MisspecifiedMean):
        block = _standardize(_correlated_block(
            rng, sc.n, sc.p + len(design.omitted), design.rho))
        X, extra = block[:, :sc.p], block[:, sc.p:]
        mean_design = np.hstack([X[:, :sc.p_t], extra])
        mean_coef = np.concatenate([theta, np.asarray(design.omitted)])
    elif isinstance(design, Heteroskedastic):
        X = _standardize(_correlated_block(rng, sc.n, sc.p, design.rho))
        if design.recipe == "variance-ramp":
            sigma = np.diag(np.linspace(1.0, design.param, sc.n))
        else:
            idx = np.arange(sc.n)
            sigma = design.param ** np.abs(idx[:, None] - idx[None, :])
    else:
        raise TypeError(f"unknown design spec: {type(design).__name__}")

    if mean_design is not None:
        mean = mean_design @ mean_coef
    else:
        mean = X[:, :sc.p_t] @ theta if sc.p_t else np.zeros(sc.n)

    if sc.phi == 0.0:
        return Dataset(y=mean.copy(), X=X, truth=None)

    z = rng.standard_normal(sc.n)
    if sigma is None:
        eps = math.sqrt(sc.phi) * z
    else:
        eps = math.sqrt(sc.phi) * (np.linalg.cholesky(sigma) @ z)

    t = sc.truth_model()
    if mean_design is not None:
        # projection coefficients: the error-minimizing fit the reference
        # model can achieve under the wider mean
        X_t = X[:, :sc.p_t]
        theta_ref, *_ = np.linalg.lstsq(X_t, mean, rcond=None)
        truth = Truth(model=t, theta=theta_ref, phi=sc.phi,
                      mean_design=mean_design, mean_coef=mean_coef)
    else:
        truth = Truth(model=t, theta=theta, phi=sc.phi, sigma=sigma)
    return Dataset(y=mean + eps, X=X, truth=truth)


# ---------------------------------------------------------------------------
# replicate execution and digestion


@dataclass(frozen=True)
class ReplicateDigest:
    replicate: int
    bundle: str
    prob_truth: float
    spurious_mass: float
    small_nonspurious_mass: float
    large_nonspurious_mass: float
    map_correct: bool
    map_false_positive: bool
    map_false_negative: bool
    median_correct: bool
    pips: tuple[float, ...]


@dataclass(frozen=True)
class InequalityCheck:
    """One empirical inequality: holds iff lhs <= rhs + slack, slack being
    three combined Monte Carlo standard errors."""

    name: str
    lhs: float
    rhs: float
    slack: float
    holds: bool


@dataclass(frozen=True)
class BundleAggregate:
    bundle: str
    replicates: int
    metrics: dict
    mean_pips: tuple[float, ...]
    se_pips: tuple[float, ...]
    selection_rates: tuple[float, ...]
    checks: tuple[InequalityCheck, ...]


@dataclass(frozen=True)
class RunResult:
    scenario: Scenario
    digests: tuple[ReplicateDigest, ...]
    aggregates: tuple[BundleAggregate, ...]
    failures: tuple[tuple[int, str, str], ...]


def _engine_seed(sc: Scenario, replicate: int, bundle_index: int) -> int:
    seq = np.random.SeedSequence(
        [sc.seed, replicate, _ENGINE_STREAM, bundle_index])
    return int(seq.generate_state(1)[0])


def _run_engine(sc: Scenario, data: Dataset, bundle: Bundle,
                replicate: int, bundle_index: int) -> PosteriorSummary:
    seed = _engine_seed(sc, replicate, bundle_index)
    coef_spec, model_prior = bundle.build(sc.n, sc.p, sc.resolved_p_bar(), seed)
    if sc.engine == "enumerate":
        return enumerate_posterior(data, coef_spec, model_prior)
    if sc.engine == "ortho-dp":
        # product-moment corrections enter the recursion per variable,
        # which is the only form the size recursion supports
        return orthogonal_dp_posterior(data, coef_spec, model_prior,
                                       pmom_factorized=isinstance(coef_spec, PMOM))
    cfg = GibbsConfig(sweeps=sc.gibbs_sweeps, burn_in=sc.gibbs_burn_in,
                      seed=seed, chains=sc.gibbs_chains)
    return gibbs_posterior(data, coef_spec, model_prior, cfg=cfg)


def _digest(summary: PosteriorSummary, t: ModelIndex, replicate: int,
            bundle: Bundle, threshold: float) -> ReplicateDigest:
    p_t = t.size
    masses = subset_masses(summary, t)
    map_model = summary.map_model
    t_set = set(t.indices)
    map_set = set(map_model.indices)
    return ReplicateDigest(
        replicate=replicate,
        bundle=bundle.name,
        prob_truth=summary.probability(t),
        spurious_mass=float(np.sum(masses.sigma)),
        small_nonspurious_mass=float(np.sum(masses.sigma_tilde[:p_t])),
        large_nonspurious_mass=float(np.sum(masses.sigma_tilde[p_t:])),
        map_correct=map_model == t,
        map_false_positive=bool(map_set - t_set),
        map_false_negative=bool(t_set - map_set),
        median_correct=summary.median_model(threshold) == t,
        pips=tuple(float(v) for v in summary.pips),
    )


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    r = values.shape[0]
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(r)) if r > 1 else 0.0
    return mean, se


def _check(name: str, lhs_vals: np.ndarray, rhs_vals: np.ndarray) -> InequalityCheck:
    r = lhs_vals.shape[0]
    lhs, rhs = float(np.mean(lhs_vals)), float(np.mean(rhs_vals))
    if r > 1:
        slack = 3.0 * math.sqrt((np.var(lhs_vals, ddof=1)
                                 + np.var(rhs_vals, ddof=1)) / r)
    else:
        slack = 0.0
    return InequalityCheck(name, lhs, rhs, slack, lhs <= rhs + slack)


def _aggregate(sc: Scenario, bundle: Bundle,
               digests: Sequence[ReplicateDigest]) -> BundleAggregate:
    r = len(digests)
    if r == 0:
        return BundleAggregate(bundle.name, 0, {}, (), (), (), ())
    pips = np.array([d.pips for d in digests])
    prob_t = np.array([d.prob_truth for d in digests])
    miss_map = np.array([not d.map_correct for d in digests], dtype=float)
    miss_med = np.array([not d.median_correct for d in digests], dtype=float)
    markov = 2.0 * (1.0 - prob_t)

    metrics = {}
    for key, vals in [
        ("prob_truth", prob_t),
        ("spurious_mass", np.array([d.spurious_mass for d in digests])),
        ("small_nonspurious_mass",
         np.array([d.small_nonspurious_mass for d in digests])),
        ("large_nonspurious_mass",
         np.array([d.large_nonspurious_mass for d in digests])),
        ("map_miss_rate", miss_map),
        ("median_miss_rate", miss_med),
        ("map_fwer_type1",
         np.array([d.map_false_positive for d in digests], dtype=float)),
        ("map_fwer_type2",
         np.array([d.map_false_negative for d in digests], dtype=float)),
    ]:
        metrics[key] = _mean_se(vals)

    thr = sc.threshold
    selected = (pips > thr).astype(float)
    checks = [
        _check("map_miss_le_two_complement", miss_map, markov),
        _check("median_miss_le_two_complement", miss_med, markov),
        _check("fwer_type1_le_map_miss",
               np.array([d.map_false_positive for d in digests], dtype=float),
               miss_map),
        _check("fwer_type2_le_map_miss",
               np.array([d.map_false_negative for d in digests], dtype=float),
               miss_map),
    ]
    active = [j for j in range(sc.p) if j < sc.p_t and sc.coef[j] != 0.0]
    inactive = [j for j in range(sc.p) if j not in set(active)]

    def worst(indices, name, lhs_fn, rhs_fn):
        best = None
        for j in indices:
            cand = _check(name, lhs_fn(j), rhs_fn(j))
            margin = cand.rhs + cand.slack - cand.lhs
            if best is None or margin < best[0]:
                best = (margin, cand)
        return best[1] if best else None

    c1 = worst(inactive, "pip_type1_worst",
               lambda j: selected[:, j], lambda j: pips[:, j] / thr)
    c2 = worst(active, "pip_type2_worst",
               lambda j: 1.0 - selected[:, j],
               lambda j: (1.0 - pips[:, j]) / (1.0 - thr))
    checks.extend(c for c in (c1, c2) if c is not None)

    mean_pips = tuple(float(v) for v in pips.mean(axis=0))
    if r > 1:
        se_pips = tuple(float(v) for v in pips.std(axis=0, ddof=1) / math.sqrt(r))
    else:
        se_pips = tuple(0.0 for _ in range(sc.p))
    rates = tuple(float(v) for v in selected.mean(axis=0))
    return BundleAggregate(bundle.name, r, metrics, mean_pips, se_pips,
                           rates, tuple(checks))


def run(scenario: Scenario) -> RunResult:
    """Execute every replicate under every bundle and aggregate.

    Engine failures are recorded per (replicate, bundle) cell and skipped;
    more than 10% failed cells aborts the run.
    """
    sc = scenario
    if sc.phi == 0.0:
        raise ValueError("running a study needs phi > 0 (truth required)")
    t = sc.truth_model()
    digests: list[ReplicateDigest] = []
    failures: list[tuple[int, str, str]] = []
    for r in range(sc.replicates):
        data = generate(sc, r)
        for b_idx, bundle in enumerate(sc.bundles):
            try:
                summary = _run_engine(sc, data, bundle, r, b_idx)
                digests.append(_digest(summary, t, r, bundle, sc.threshold))
            except Exception as exc:  # recorded, run continues
                failures.append((r, bundle.name,
                                 f"{type(exc).__name__}: {exc}"))
    cells = sc.replicates * max(len(sc.bundles), 1)
    if len(failures) > 0.1 * cells:
        raise RuntimeError(
            f"{len(failures)} of {cells} replicate cells failed; "
            f"first: {failures[0]}")
    aggregates = tuple(
        _aggregate(sc, bundle,
                   [d for d in digests if d.bundle == bundle.name])
        for bundle in sc.bundles)
    return RunResult(sc, tuple(digests), aggregates, tuple(failures))


# ---------------------------------------------------------------------------
# emission


def _theta_star(sc: Scenario) -> np.ndarray:
    out = np.zeros(sc.p)
    out[:sc.p_t] = sc.coef
    return out


def emit(result: RunResult, fmt: str = "csv",
         out_dir: Union[str, Path] = ".") -> list[Path]:
    """Write aggregate tables; `csv` produces summary/pips/checks files,
    `plotdata` a single long-format (x, series, value) file."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sc = result.scenario
    theta = _theta_star(sc)
    paths = []

    if fmt == "csv":
        p = out / "summary.csv"
        with p.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["bundle", "metric", "mean", "se"])
            for agg in result.aggregates:
                for metric, (mean, se) in agg.metrics.items():
                    w.writerow([agg.bundle, metric, mean, se])
        paths.append(p)

        p = out / "pips.csv"
        with p.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["bundle", "variable", "theta_star", "mean_pip", "se"])
            for agg in result.aggregates:
                for j in range(len(agg.mean_pips)):
                    w.writerow([agg.bundle, j, theta[j],
                                agg.mean_pips[j], agg.se_pips[j]])
        paths.append(p)

        p = out / "checks.csv"
        with p.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["bundle", "check", "lhs", "rhs", "slack", "holds"])
            for agg in result.aggregates:
                for chk in agg.checks:
                    w.writerow([agg.bundle, chk.name, chk.lhs, chk.rhs,
                                chk.slack, chk.holds])
        paths.append(p)
    elif fmt == "plotdata":
        p = out / "plotdata.csv"
        with p.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "series", "value"])
            for agg in result.aggregates:
                for metric, (mean, _) in agg.metrics.items():
                    w.writerow([sc.n, f"{agg.bundle}/{metric}", mean])
                for j, v in enumerate(agg.mean_pips):
                    w.writerow([j, f"{agg.bundle}/pip", v])
        paths.append(p)
    else:
        raise ValueError("format must be csv or plotdata")
    return paths


@dataclass(frozen=True)
class SweepRow:
    n: int
    bundle: str
    metric: str
    mean: float
    se: float


def run_size_sweep(n_grid: Sequence[int],
                   scenario_factory: Callable[[int], Scenario]) -> list[SweepRow]:
    """Run one study per sample size and collect the tracked posterior-mass
    series (truth probability, spurious mass, small non-spurious mass)."""
    rows: list[SweepRow] = []
    for n in n_grid:
        result = run(scenario_factory(int(n)))
        for agg in result.aggregates:
            for metric in ("prob_truth", "spurious_mass",
                           "small_nonspurious_mass"):
                mean, se = agg.metrics[metric]
                rows.append(SweepRow(int(n), agg.bundle, metric, mean, se))
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "bundle", "metric", "mean", "se"])
        for row in rows:
            w.writerow([row.n, row.bundle, row.metric, row.mean, row.se])
    return path


# ---------------------------------------------------------------------------
# study presets

_LADDER = (0.25, 0.5, 0.75, 1.0, 1.5)


def orthogonal_study_scenario(study: int, *, replicates: int = 20,
                              seed: int = 0,
                              bundles: Optional[Sequence[Bundle]] = None) -> Scenario:
    """Orthogonal-design studies 1-4: p in {100, 500} with n = p + 10,
    truth of 5 distinct signals or 20 (each signal repeated four times)."""
    if study not in (1, 2, 3, 4):
        raise ValueError("study must be one of 1, 2, 3, 4")
    p = 100 if study in (1, 2) else 500
    coef = _LADDER if study in (1, 3) else tuple(np.repeat(_LADDER, 4))
    return Scenario(design=Orthogonal(), n=p + 10, p=p, coef=coef, phi=1.0,
                    bundles=tuple(bundles) if bundles is not None
                    else standard_bundles(),
                    replicates=replicates, seed=seed, engine="ortho-dp")


def correlated_study_scenario(n: int, *, theta: float = 0.5,
                              replicates: int = 20, seed: int = 0,
                              sweeps: int = 10_000, burn_in: int = 1_000,
                              bundles: Optional[Sequence[Bundle]] = None) -> Scenario:
    """Equicorrelated(0.5) study with p = n and ten equal signals."""
    return Scenario(design=Equicorrelated(0.5), n=n, p=n, coef=(theta,) * 10,
                    phi=1.0,
                    bundles=tuple(bundles) if bundles is not None
                    else standard_bundles(),
                    replicates=replicates, seed=seed, engine="gibbs",
                    gibbs_sweeps=sweeps, gibbs_burn_in=burn_in)
