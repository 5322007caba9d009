import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modsel.core import Dataset, ModelIndex, NULL_MODEL, SufficientStats
from modsel.coef_priors import ZellnerUnknownPhi, log_evidence
from modsel.l0 import (
    BIC,
    EBIC,
    RIC,
    CustomEta,
    InterpolationError,
    log_h,
    make_criterion,
    normalized_l0,
    penalty,
)


def toy_stats(seed=0, n=25, p=4):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = 0.9 * X[:, 0] + rng.standard_normal(n)
    return SufficientStats(Dataset(y=y, X=X))


class TestPenalty:
    def test_known_values(self):
        assert penalty(2, 100, 10, BIC()) == pytest.approx(math.log(100))
        assert penalty(1, 50, 10, RIC()) == pytest.approx(math.log(10))
        expect = 1.5 * math.log(100) + math.log(math.comb(50, 3))
        assert penalty(3, 100, 50, EBIC(xi=1.0)) == pytest.approx(expect, rel=1e-12)

    def test_custom_eta(self):
        aic = CustomEta(lambda size, n, p: float(size))
        assert penalty(4, 30, 10, aic) == 4.0

    def test_validation(self):
        with pytest.raises(ValueError):
            penalty(3, 1, 10, BIC())
        with pytest.raises(ValueError):
            penalty(11, 30, 10, BIC())
        with pytest.raises(ValueError):
            EBIC(xi=0.0)
        with pytest.raises(ValueError):
            EBIC(xi=1.2)

    @given(st.integers(2, 10_000), st.integers(2, 400), st.floats(0.1, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_size_on_sparse_half(self, n, p, xi):
        # the binomial term in EBIC turns around past p/2, outside the sparse
        # regime these criteria target; monotonicity is asserted up to there
        for spec in (BIC(), RIC(), EBIC(xi=xi)):
            vals = [penalty(l, n, p, spec) for l in range(p // 2 + 1)]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


class TestLogH:
    def test_equal_fit_equal_size_ties(self):
        stats = toy_stats()
        rss = {m: stats.fit(m).rss for m in (ModelIndex.of(1), ModelIndex.of(2))}
        a, b = log_h(stats, ModelIndex.of(1), BIC()), log_h(stats, ModelIndex.of(2), BIC())
        # not exactly equal data-wise; check the formula reacts only via rss
        assert (a - b) == pytest.approx(
            -0.5 * stats.n * math.log(rss[ModelIndex.of(1)] / rss[ModelIndex.of(2)]),
            rel=1e-10)

    def test_null_model_direct_formula(self):
        stats = toy_stats(1)
        n = stats.n
        expect = -0.5 * n * (math.log(2 * math.pi * stats.yty / n) + 1.0)
        assert log_h(stats, NULL_MODEL, BIC()) == pytest.approx(expect, rel=1e-12)

    def test_pairwise_matches_rss_ratio_identity(self):
        stats = toy_stats(2)
        spec = EBIC(xi=0.7)
        t, m = ModelIndex.of(0), ModelIndex.of(0, 1, 3)
        s_t, s_m = stats.fit(t).rss, stats.fit(m).rss
        n, p = stats.n, stats.p
        expect = (-0.5 * n * math.log(s_t / s_m)
                  + penalty(m, n, p, spec) - penalty(t, n, p, spec))
        got = log_h(stats, t, spec) - log_h(stats, m, spec)
        assert got == pytest.approx(expect, rel=1e-10)

    def test_interpolation_error(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((4, 4))
        y = X @ np.ones(4)
        stats = SufficientStats(Dataset(y=y, X=X))
        with pytest.raises(InterpolationError):
            log_h(stats, ModelIndex.of(0, 1, 2, 3), BIC())


class TestNormalized:
    def test_single_model_and_ties(self):
        stats = toy_stats(4)
        one = normalized_l0(stats, [ModelIndex.of(0)], BIC())
        np.testing.assert_allclose(one, [1.0])
        with pytest.raises(ValueError):
            normalized_l0(stats, [], BIC())

    def test_sums_to_one_over_enumeration(self):
        stats = toy_stats(5)
        universe = [ModelIndex.of(*c) for r in range(stats.p + 1)
                    for c in itertools.combinations(range(stats.p), r)]
        for spec in (BIC(), RIC(), EBIC(xi=0.5)):
            probs = normalized_l0(stats, universe, spec)
            assert probs.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(probs >= 0)

    def test_invariant_to_constant_penalty_shift(self):
        stats = toy_stats(6)
        universe = [NULL_MODEL, ModelIndex.of(0), ModelIndex.of(0, 1)]
        base = CustomEta(lambda size, n, p: 0.5 * size * math.log(n))
        shifted = CustomEta(lambda size, n, p: 0.5 * size * math.log(n) + 7.0)
        np.testing.assert_allclose(normalized_l0(stats, universe, base),
                                   normalized_l0(stats, universe, shifted),
                                   rtol=1e-12)

    def test_argmax_matches_classical_criterion(self):
        stats = toy_stats(7)
        universe = [ModelIndex.of(*c) for r in range(3)
                    for c in itertools.combinations(range(stats.p), r)]
        probs = normalized_l0(stats, universe, BIC())
        n = stats.n
        classical = []
        for m in universe:
            s_m = stats.fit(m).rss if m.size else stats.yty
            ll = -0.5 * n * (math.log(2 * math.pi * s_m / n) + 1.0)
            classical.append(-2 * ll + 2 * penalty(m, n, stats.p, BIC()))
        assert int(np.argmax(probs)) == int(np.argmin(classical))

    def test_bic_tracks_unit_information_posterior_argmax(self):
        # strong signals: the criterion and the tau=n posterior agree on the
        # top model in the vast majority of replicates
        rng = np.random.default_rng(11)
        n, p = 100, 8
        universe = [ModelIndex.of(*c) for r in range(p + 1)
                    for c in itertools.combinations(range(p), r)]
        agree = 0
        reps = 100
        for _ in range(reps):
            X = rng.standard_normal((n, p))
            y = X[:, 0] - X[:, 1] + 0.8 * X[:, 2] + rng.standard_normal(n)
            stats = SufficientStats(Dataset(y=y, X=X))
            probs = normalized_l0(stats, universe, BIC())
            spec = ZellnerUnknownPhi(tau=float(n))
            ev = [log_evidence(stats, m, spec) for m in universe]
            agree += int(np.argmax(probs)) == int(np.argmax(ev))
        assert agree >= 90


def test_make_criterion():
    assert isinstance(make_criterion("bic"), BIC)
    assert isinstance(make_criterion("ric"), RIC)
    assert make_criterion("ebic").xi == 1.0
    assert make_criterion("ebic:0.25").xi == 0.25
    with pytest.raises(ValueError):
        make_criterion("aic")
