"""Datasets, model indices and least-squares machinery shared by every engine.

All downstream computations consume sufficient statistics of a fixed design
(the Gram matrix X'X, cross products X'y and y'y) rather than raw data, so
that enumerating or sampling many models never refits from scratch.
`SufficientStats` caches one Cholesky factorization per visited model behind
a lock and is safe to share across threads.
"""
from __future__ import annotations

import csv
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy import linalg

__all__ = [
    "ModelIndex",
    "NULL_MODEL",
    "Truth",
    "Dataset",
    "ModelFit",
    "SufficientStats",
    "SingularModelError",
    "NotNestedError",
    "fit_least_squares",
    "f_statistic",
    "noncentrality_nested",
    "sandwich_eigs",
    "completion_eigs",
    "shrinkage_moments",
    "SandwichResult",
    "ShrinkageReport",
]


class SingularModelError(np.linalg.LinAlgError):
    """A model's Gram matrix is numerically singular beyond jitter repair."""


class NotNestedError(ValueError):
    """An operation requiring nested models received a non-nested pair."""


@dataclass(frozen=True)
class ModelIndex:
    """An immutable subset of design columns, stored sorted and 0-based."""

    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        idx = tuple(int(j) for j in self.indices)
        if any(j < 0 for j in idx):
            raise ValueError("column indices must be nonnegative")
        if list(idx) != sorted(set(idx)):
            raise ValueError("column indices must be strictly increasing")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, *indices: int) -> "ModelIndex":
        return cls(tuple(sorted({int(j) for j in indices})))

    @property
    def size(self) -> int:
        return len(self.indices)

    def contains(self, other: "ModelIndex") -> bool:
        return set(other.indices) <= set(self.indices)

    def union(self, other: "ModelIndex") -> "ModelIndex":
        return ModelIndex.of(*(self.indices + other.indices))

    def add(self, j: int) -> "ModelIndex":
        return ModelIndex.of(*(self.indices + (j,)))

    def drop(self, j: int) -> "ModelIndex":
        if j not in self.indices:
            raise ValueError(f"column {j} not in model")
        return ModelIndex(tuple(i for i in self.indices if i != j))

    def bitmask(self) -> int:
        return sum(1 << j for j in self.indices)

    def bool_mask(self, p: int) -> np.ndarray:
        m = np.zeros(p, dtype=bool)
        m[list(self.indices)] = True
        return m

    def __iter__(self):
        return iter(self.indices)

    def __repr__(self) -> str:
        return f"ModelIndex{self.indices}"


NULL_MODEL = ModelIndex(())


@dataclass(frozen=True)
class Truth:
    """Data-generating mechanism attached to a dataset.

    The sampling model is y ~ N(mean, phi * sigma) where `mean` is
    X[:, model] @ theta unless an explicit misspecified mean design
    (`mean_design`, `mean_coef`) is supplied, and `sigma=None` means the
    identity (homoskedastic errors).
    """

    model: ModelIndex
    theta: np.ndarray
    phi: float
    sigma: np.ndarray | None = None
    mean_design: np.ndarray | None = None
    mean_coef: np.ndarray | None = None

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim != 1 or theta.shape[0] != self.model.size:
            raise ValueError("theta must be 1-d with one entry per model column")
        if not self.phi > 0:
            raise ValueError("phi must be positive")
        if (self.mean_design is None) != (self.mean_coef is None):
            raise ValueError("mean_design and mean_coef must be given together")
        object.__setattr__(self, "theta", theta)

    def mean(self, X: np.ndarray) -> np.ndarray:
        if self.mean_design is not None:
            return self.mean_design @ np.asarray(self.mean_coef, dtype=float)
        if self.model.size == 0:
            return np.zeros(X.shape[0])
        return X[:, list(self.model.indices)] @ self.theta

    def covariance(self, n: int) -> np.ndarray:
        sigma = np.eye(n) if self.sigma is None else np.asarray(self.sigma, float)
        return self.phi * sigma


@dataclass(frozen=True)
class Dataset:
    """A response vector, a design matrix and (optionally) the truth behind them."""

    y: np.ndarray
    X: np.ndarray
    truth: Truth | None = None
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=float)
        X = np.asarray(self.X, dtype=float)
        if y.ndim != 1:
            raise ValueError("y must be 1-d")
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ValueError("X must be 2-d with one row per observation")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(X))):
            raise ValueError("y and X must be finite")
        if self.names is not None and len(self.names) != X.shape[1]:
            raise ValueError("one name per design column required")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def column_names(self) -> tuple[str, ...]:
        if self.names is not None:
            return self.names
        return tuple(f"x{j + 1}" for j in range(self.p))

    @classmethod
    def from_csv(cls, path: str | Path) -> "Dataset":
        """Read a dataset from CSV: header row, response in the first column."""
        path = Path(path)
        with path.open(newline="") as fh:
            header = next(csv.reader(fh))
        if len(header) < 2:
            raise ValueError("expected a response column plus at least one covariate")
        body = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if body.shape[1] != len(header):
            raise ValueError("header and data column counts disagree")
        return cls(y=body[:, 0], X=body[:, 1:], names=tuple(header[1:]))

    def to_csv(self, path: str | Path, response_name: str = "y") -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([response_name, *self.column_names()])
            for i in range(self.n):
                writer.writerow([repr(float(self.y[i])), *(repr(float(v)) for v in self.X[i])])


@dataclass(frozen=True)
class ModelFit:
    """Least-squares summaries of one model: kept small so caching stays cheap."""

    model: ModelIndex
    theta: np.ndarray
    rss: float
    explained: float
    chol: np.ndarray
    jitter: float

    def solve_gram(self, v: np.ndarray) -> np.ndarray:
        """Solve (X_m'X_m) a = v using the cached Cholesky factor."""
        if self.model.size == 0:
            return np.zeros_like(v)
        return linalg.cho_solve((self.chol, True), v)


class SufficientStats:
    """Gram/cross-product summaries of a dataset with a per-model fit cache."""

    def __init__(self, data: Dataset):
        self.data = data
        self.gram = data.X.T @ data.X
        self.xty = data.X.T @ data.y
        self.yty = float(data.y @ data.y)
        self._fits: dict[tuple[int, ...], ModelFit] = {}
        self._lock = threading.Lock()

    @property
    def n(self) -> int:
        return self.data.n

    @property
    def p(self) -> int:
        return self.data.p

    def gram_sub(self, model: ModelIndex) -> np.ndarray:
        idx = list(model.indices)
        return self.gram[np.ix_(idx, idx)]

    def xty_sub(self, model: ModelIndex) -> np.ndarray:
        return self.xty[list(model.indices)]

    def fit(self, model: ModelIndex) -> ModelFit:
        if model.size and model.indices[-1] >= self.p:
            raise ValueError("model references columns beyond the design")
        with self._lock:
            hit = self._fits.get(model.indices)
        if hit is not None:
            return hit
        fit = self._compute_fit(model)
        with self._lock:
            self._fits.setdefault(model.indices, fit)
        return fit

    def _compute_fit(self, model: ModelIndex) -> ModelFit:
        k = model.size
        if k == 0:
            fit = ModelFit(model, np.zeros(0), self.yty, 0.0,
                           np.zeros((0, 0)), 0.0)
            return fit
        g = self.gram_sub(model)
        z = self.xty_sub(model)
        chol, jitter = _chol_with_jitter(g)
        theta = linalg.cho_solve((chol, True), z)
        explained = float(z @ theta)
        # rss via y'y - y'H y; tiny negatives from cancellation are clamped
        rss = max(self.yty - explained, 0.0)
        return ModelFit(model, theta, rss, explained, chol, jitter)

    def projection_quad(self, model: ModelIndex, v: np.ndarray) -> float:
        """v' H_m v for the projection H_m onto the model's column span."""
        if model.size == 0:
            return 0.0
        xv = self.data.X[:, list(model.indices)].T @ v
        return float(xv @ self.fit(model).solve_gram(xv))


def _chol_with_jitter(g: np.ndarray) -> tuple[np.ndarray, float]:
    try:
        return linalg.cholesky(g, lower=True), 0.0
    except np.linalg.LinAlgError:
        pass
    jitter = 1e-10 * float(np.trace(g)) / g.shape[0]
    try:
        return linalg.cholesky(g + jitter * np.eye(g.shape[0]), lower=True), jitter
    except np.linalg.LinAlgError as exc:
        raise SingularModelError(
            f"Gram matrix singular even after jitter {jitter:.3e}") from exc


def _as_stats(data: Dataset | SufficientStats) -> SufficientStats:
    if isinstance(data, SufficientStats):
        return data
    return SufficientStats(data)


def fit_least_squares(data: Dataset | SufficientStats, model: ModelIndex) -> ModelFit:
    """Least-squares fit of one model; cached when `data` is a SufficientStats."""
    return _as_stats(data).fit(model)


def f_statistic(stats: SufficientStats, m: ModelIndex, t: ModelIndex) -> float:
    """Classical F statistic comparing a model m to a strict submodel t.

    Returns [(rss_t - rss_m)/(p_m - p_t)] / [rss_m/(n - p_m)].
    """
    if not (m.contains(t) and m.size > t.size):
        raise NotNestedError("t must be a strict submodel of m")
    if stats.n <= m.size:
        raise ValueError("need n > p_m for the denominator degrees of freedom")
    fit_m, fit_t = stats.fit(m), stats.fit(t)
    num = (fit_t.rss - fit_m.rss) / (m.size - t.size)
    den = fit_m.rss / (stats.n - m.size)
    return num / den


def _require_truth(data: Dataset) -> Truth:
    if data.truth is None:
        raise ValueError("this operation needs a dataset with attached truth")
    return data.truth


def noncentrality_nested(data: Dataset, m: ModelIndex, q: ModelIndex,
                         stats: SufficientStats | None = None) -> float:
    """Noncentrality of the explained-sum-of-squares gap between nested models.

    For M_m a submodel of M_q and truth mean mu with variance phi, this is
    mu'(H_q - H_m)mu / phi, the noncentrality of the chi-square law of the
    fitted quadratic-form difference.
    """
    if not q.contains(m):
        raise NotNestedError("m must be a submodel of q")
    truth = _require_truth(data)
    st = stats if stats is not None else SufficientStats(data)
    mu = truth.mean(data.X)
    lam = (st.projection_quad(q, mu) - st.projection_quad(m, mu)) / truth.phi
    return max(lam, 0.0)


@dataclass(frozen=True)
class SandwichResult:
    """Eigenvalue bracket for quadratic-form laws under correlated errors."""

    omega_lo: float
    omega_hi: float
    lam_tilde: float
    lam_identity: float


def _added_columns(data: Dataset, m: ModelIndex, q: ModelIndex,
                   stats: SufficientStats) -> np.ndarray:
    extra = [j for j in q.indices if j not in m.indices]
    Xs = data.X[:, extra]
    if m.size == 0:
        return Xs
    Xm = data.X[:, list(m.indices)]
    fit_m = stats.fit(m)
    return Xs - Xm @ fit_m.solve_gram(Xm.T @ Xs)


def sandwich_eigs(data: Dataset, m: ModelIndex, q: ModelIndex,
                  stats: SufficientStats | None = None) -> SandwichResult:
    """Sharpest scale bracket for the nested quadratic-form gap under error
    covariance phi * Sigma.

    Writes the gap as a quadratic form in the columns of q orthogonalized
    against m and returns the extreme generalized eigenvalues of
    (Xt' Sigma Xt, Xt' Xt) together with the matched noncentrality
    lam_tilde = (Xt'mu)'(Xt' Sigma Xt)^{-1}(Xt'mu) / phi.
    """
    if not (q.contains(m) and q.size > m.size):
        raise NotNestedError("m must be a strict submodel of q")
    truth = _require_truth(data)
    st = stats if stats is not None else SufficientStats(data)
    Xt = _added_columns(data, m, q, st)
    B = Xt.T @ Xt
    mu = truth.mean(data.X)
    ztmu = Xt.T @ mu
    lam_identity = float(ztmu @ linalg.cho_solve((_chol_with_jitter(B)[0], True), ztmu)) / truth.phi
    if truth.sigma is None:
        return SandwichResult(1.0, 1.0, lam_identity, lam_identity)
    A = Xt.T @ truth.sigma @ Xt
    omegas = linalg.eigvalsh(A, B)
    lam_tilde = float(ztmu @ linalg.cho_solve((_chol_with_jitter(A)[0], True), ztmu)) / truth.phi
    return SandwichResult(float(omegas[0]), float(omegas[-1]), lam_tilde, lam_identity)


def completion_eigs(data: Dataset, q: ModelIndex) -> tuple[float, float]:
    """Extreme eigenvalues of T' Sigma T for one orthonormal completion T of
    the column span of q (T spans the residual space, T'X_q = 0)."""
    truth = _require_truth(data)
    if truth.sigma is None:
        return 1.0, 1.0
    if q.size == 0:
        w = linalg.eigvalsh(truth.sigma)
        return float(w[0]), float(w[-1])
    T = linalg.null_space(data.X[:, list(q.indices)].T)
    w = linalg.eigvalsh(T.T @ truth.sigma @ T)
    return float(w[0]), float(w[-1])


@dataclass(frozen=True)
class ShrinkageReport:
    """Moments of the ridge-shrunken estimator and bracketing check flags.

    `checks` maps check names to per-coordinate booleans (or a scalar bool).
    The `*_printed` checks evaluate the bracketing inequalities literally as
    displayed; `ratio_eigen` and `mean_whitened` are the tighter forms that
    follow from the eigenvalue argument and hold on every instance. The
    printed variance-ratio lower end is equivalent to the eigen form only
    when the spectrum of V X'X is flat, so `ratio_printed` can legitimately
    report False (notably in `zellner` mode); it is a report, not an error.
    """

    model: ModelIndex
    tau: float
    rho: np.ndarray
    mu: np.ndarray
    theta_star: np.ndarray
    sigma_diag: np.ndarray
    sigma_tilde_diag: np.ndarray
    lambda_coord: np.ndarray
    delta_star: np.ndarray
    applicable: np.ndarray
    checks: dict[str, np.ndarray | bool]

    def all_hold(self, names: Iterable[str]) -> bool:
        out = True
        for name in names:
            val = self.checks[name]
            if isinstance(val, np.ndarray):
                out = out and bool(np.all(val[self.applicable])) if val.shape == self.applicable.shape \
                    else out and bool(np.all(val))
            else:
                out = out and bool(val)
        return out


def _v_matrix(mode: str | np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Prior scale matrix V and the eigenvalues of V X'X for a given mode."""
    k = g.shape[0]
    if isinstance(mode, str):
        if mode == "zellner":
            gi = linalg.cho_solve((_chol_with_jitter(g)[0], True), np.eye(k))
            return gi, np.ones(k)
        if mode == "diag-gram-inverse":
            d = np.diag(g)
            v = np.diag(1.0 / d)
            scale = 1.0 / np.sqrt(d)
            rho = linalg.eigvalsh(g * np.outer(scale, scale))
            return v, rho
        raise ValueError(f"unknown V mode {mode!r}")
    v = np.asarray(mode, dtype=float)
    if v.shape != g.shape:
        raise ValueError("explicit V must match the model's Gram shape")
    lv = _chol_with_jitter(v)[0]
    rho = linalg.eigvalsh(lv.T @ g @ lv)
    return v, rho


def shrinkage_moments(data: Dataset, q: ModelIndex, tau: float,
                      v_mode: str | np.ndarray = "zellner",
                      stats: SufficientStats | None = None) -> ShrinkageReport:
    """Exact moments of theta_hat = (X'X + V^{-1}/tau)^{-1} X'y under the truth,
    with the bracketing inequalities relating them to least squares checked
    and reported.

    Under the truth mean mu and error scale phi, theta_hat has mean
    B^{-1} X'mu and covariance phi * B^{-1} X'X B^{-1} with
    B = X'X + V^{-1}/tau (homoskedastic errors assumed for the covariance).
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    truth = _require_truth(data)
    if q.size == 0:
        raise ValueError("shrinkage moments need at least one column")
    st = stats if stats is not None else SufficientStats(data)
    g = st.gram_sub(q)
    v, rho = _v_matrix(v_mode, g)
    rho_min, rho_max = float(np.min(rho)), float(np.max(rho))
    chol_v = _chol_with_jitter(v)[0]
    v_inv = linalg.cho_solve((chol_v, True), np.eye(q.size))
    b = g + v_inv / tau
    chol_b = _chol_with_jitter(b)[0]
    b_inv = linalg.cho_solve((chol_b, True), np.eye(q.size))

    mu_y = truth.mean(data.X)
    xmu = data.X[:, list(q.indices)].T @ mu_y
    g_inv = linalg.cho_solve((_chol_with_jitter(g)[0], True), np.eye(q.size))
    theta_star = g_inv @ xmu
    mu = b_inv @ xmu
    sigma = b_inv @ g @ b_inv
    sigma_diag = np.diag(sigma).copy()
    sigma_tilde_diag = np.diag(g_inv).copy()
    phi = truth.phi

    lambda_coord = theta_star ** 2 / (phi * sigma_tilde_diag)
    applicable = np.abs(theta_star) > 1e-12 * max(np.max(np.abs(theta_star)), 1e-300)
    with np.errstate(divide="ignore"):
        delta_star = np.where(
            applicable,
            np.linalg.norm(theta_star) / ((tau * rho_max + 1.0) * np.abs(theta_star)),
            np.inf,
        )

    ratio = sigma_diag / sigma_tilde_diag
    tol = 1e-9
    lo_printed = (tau * rho_min) ** 2 / ((tau * rho_min) ** 2 + 1.0)
    hi_printed = (tau * rho_max) ** 2 / ((tau * rho_max) ** 2 + 1.0)
    lo_eigen = (tau * rho_min / (1.0 + tau * rho_min)) ** 2
    hi_eigen = (tau * rho_max / (1.0 + tau * rho_max)) ** 2

    dev = np.abs(mu - theta_star)
    u_printed = np.linalg.norm(theta_star) / (tau * rho_max + 1.0)
    u_loose = np.linalg.norm(theta_star) / (tau * rho_min + 1.0)
    w_dev = linalg.solve_triangular(chol_v, mu - theta_star, lower=True)
    w_theta = linalg.solve_triangular(chol_v, theta_star, lower=True)
    whitened_ok = bool(
        np.linalg.norm(w_dev) <= np.linalg.norm(w_theta) / (tau * rho_min + 1.0) * (1 + tol) + 1e-300
    )

    scaled = mu ** 2 / (phi * sigma_diag)
    comb_lo = lambda_coord * (1.0 - 2.0 * delta_star) * (1.0 + 1.0 / (tau * rho_max) ** 2)
    comb_hi = lambda_coord * (1.0 + 2.0 * delta_star + delta_star ** 2) * (1.0 + 1.0 / (tau * rho_min) ** 2)

    checks: dict[str, np.ndarray | bool] = {
        "ratio_printed": (ratio >= lo_printed * (1 - tol)) & (ratio <= hi_printed * (1 + tol)),
        "ratio_eigen": (ratio >= lo_eigen * (1 - tol)) & (ratio <= hi_eigen * (1 + tol)),
        "mean_printed": dev <= u_printed * (1 + tol) + 1e-300,
        "mean_loose": dev <= u_loose * (1 + tol) + 1e-300,
        "mean_whitened": whitened_ok,
        "combined_printed": np.where(
            applicable,
            (scaled >= comb_lo * (1 - tol) - 1e-300) & (scaled <= comb_hi * (1 + tol) + 1e-300),
            True,
        ),
    }
    return ShrinkageReport(
        model=q, tau=float(tau), rho=rho, mu=mu, theta_star=theta_star,
        sigma_diag=sigma_diag, sigma_tilde_diag=sigma_tilde_diag,
        lambda_coord=lambda_coord, delta_star=delta_star,
        applicable=applicable, checks=checks,
    )
