import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modsel.core import ModelIndex
from modsel.model_priors import (
    BetaBinomialPrior,
    ComplexityPrior,
    CustomSizeWeightsPrior,
    UniformPrior,
    consistency_diagnostics,
    log_binom,
    make_prior,
)

ALL_PRIORS = [
    UniformPrior(12, 7),
    BetaBinomialPrior(12, 7),
    ComplexityPrior(12, 7, c=1.0),
    ComplexityPrior(12, 12, c=0.5),
    CustomSizeWeightsPrior(12, 4, weights=(1.0, 3.0, 0.5, 2.0, 1.5)),
]


@pytest.mark.parametrize("prior", ALL_PRIORS, ids=lambda pr: type(pr).__name__)
def test_total_mass_is_one(prior):
    total = math.fsum(
        math.comb(prior.p, l) * math.exp(prior.log_prior(l))
        for l in range(prior.p_bar + 1)
    )
    assert total == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("prior", ALL_PRIORS, ids=lambda pr: type(pr).__name__)
def test_depends_only_on_size(prior):
    rng = np.random.default_rng(0)
    for _ in range(20):
        size = int(rng.integers(0, prior.p_bar + 1))
        a = ModelIndex.of(*rng.choice(prior.p, size=size, replace=False))
        b = ModelIndex.of(*rng.choice(prior.p, size=size, replace=False))
        assert prior.log_prior(a) == prior.log_prior(b)
        assert prior.log_prior(a) == prior.log_prior(size)


@given(st.integers(0, 7), st.integers(0, 7))
@settings(max_examples=50, deadline=None)
def test_odds_antisymmetric_and_consistent(sa, sb):
    for prior in ALL_PRIORS[:3]:
        fwd = prior.log_prior_odds(sa, sb)
        assert fwd == pytest.approx(-prior.log_prior_odds(sb, sa), abs=1e-12)
        assert fwd == pytest.approx(prior.log_prior(sa) - prior.log_prior(sb),
                                    rel=1e-12, abs=1e-12)


def test_uniform_odds_are_zero():
    prior = UniformPrior(30, 10)
    assert prior.log_prior_odds(7, 2) == 0.0
    assert prior.log_prior_odds(ModelIndex.of(0, 5), ModelIndex.of(1, 2, 3)) == 0.0


def test_beta_binomial_small_case():
    # p=5, p_bar=5, size 1: mass 1/((p_bar+1) * C(5,1))
    prior = BetaBinomialPrior(5, 5)
    assert prior.log_prior(1) == pytest.approx(math.log(1 / 6) - math.log(5), abs=1e-12)
    assert prior.log_prior_odds(2, 1) == pytest.approx(math.log(0.5), abs=1e-12)


def test_complexity_odds_match_rational_oracle():
    # frozen Fraction-arithmetic values: r_{4,3} = 1/2425 at p=100, c=1;
    # r_{5,2} = 1/652800 at p=20, c=1
    prior = ComplexityPrior(100, 10, c=1.0)
    assert prior.log_prior_odds(4, 3) == pytest.approx(-7.793586803371584, abs=1e-10)
    prior20 = ComplexityPrior(20, 10, c=1.0)
    assert prior20.log_prior_odds(5, 2) == pytest.approx(-13.389026082632034, abs=1e-10)


def test_out_of_support_is_minus_inf():
    prior = BetaBinomialPrior(10, 4)
    assert prior.log_prior(5) == -math.inf
    assert prior.log_prior(ModelIndex.of(0, 1, 2, 3, 4)) == -math.inf
    assert prior.log_prior_odds(5, 2) == -math.inf
    assert prior.log_prior_odds(2, 5) == math.inf


def test_validation_errors():
    with pytest.raises(ValueError):
        UniformPrior(5, 6)
    with pytest.raises(ValueError):
        ComplexityPrior(5, 3, c=0.0)
    with pytest.raises(ValueError):
        CustomSizeWeightsPrior(5, 2, weights=(1.0, 2.0))
    with pytest.raises(ValueError):
        CustomSizeWeightsPrior(5, 2, weights=(1.0, -1.0, 2.0))
    with pytest.raises(ValueError):
        make_prior("nope", 5, 3)


def test_custom_weights_reduce_to_beta_binomial():
    flat = CustomSizeWeightsPrior(9, 6, weights=(2.0,) * 7)
    bb = BetaBinomialPrior(9, 6)
    for l in range(7):
        assert flat.log_prior(l) == pytest.approx(bb.log_prior(l), abs=1e-12)


def test_make_prior_dispatch():
    assert isinstance(make_prior("uniform", 8, 4), UniformPrior)
    assert isinstance(make_prior("beta-binomial", 8, 4), BetaBinomialPrior)
    assert make_prior("complexity", 8, 4, c=2.0).c == 2.0
    assert isinstance(make_prior("custom", 8, 2, weights=[1, 2, 3]),
                      CustomSizeWeightsPrior)


class TestConsistencyDiagnostics:
    def test_uniform_c1_is_pure_tau_power(self):
        prior = UniformPrior(50, 20)
        rep = consistency_diagnostics(prior, tau=50.0, p_t=5, lam=100.0, beta2=0.5)
        for size in range(6, 21):
            expect = 50.0 ** (-0.5 * (size - 5) / 2)
            assert rep.row(size).c1_ratio == pytest.approx(expect, rel=1e-12)
            assert rep.row(size).tau_threshold == 1.0
            assert rep.row(size).lambda_threshold is None

    def test_beta_binomial_small_model_threshold(self):
        # (p_t - p_m) log((p - p_t) tau / p_m) at p=100, p_t=5, p_m=3, tau=100
        rep = consistency_diagnostics(BetaBinomialPrior(100, 10), tau=100.0,
                                      p_t=5, lam=50.0)
        assert rep.row(3).lambda_threshold == pytest.approx(2 * math.log(9500 / 3),
                                                            abs=1e-12)
        assert rep.row(3).tau_threshold is None
        assert rep.row(0).lambda_threshold is None
        big = rep.row(8)
        assert big.tau_threshold == pytest.approx((10 / 95) ** 4.0, rel=1e-12)

    def test_matches_formula_reimplementation(self):
        # independent recomputation of every reported quantity
        rng = np.random.default_rng(4)
        for _ in range(20):
            p = int(rng.integers(10, 200))
            p_bar = int(rng.integers(2, min(p, 30)))
            p_t = int(rng.integers(0, p_bar + 1))
            tau = float(rng.uniform(1.5, 500))
            lam = float(rng.uniform(1.0, 300))
            beta2 = float(rng.uniform(0.1, 0.9))
            beta3 = float(rng.uniform(0.1, 0.9))
            c = float(rng.uniform(0.2, 2.0))
            for prior in (UniformPrior(p, p_bar), BetaBinomialPrior(p, p_bar),
                          ComplexityPrior(p, p_bar, c)):
                rep = consistency_diagnostics(prior, tau, p_t, lam, beta2, beta3)
                for size in range(p_bar + 1):
                    if isinstance(prior, UniformPrior):
                        log_r = 0.0
                    elif isinstance(prior, BetaBinomialPrior):
                        log_r = log_binom(p, p_t) - log_binom(p, size)
                    else:
                        log_r = (-c * (size - p_t) * math.log(p)
                                 + log_binom(p, p_t) - log_binom(p, size))
                    row = rep.row(size)
                    assert row.log_odds == pytest.approx(log_r, rel=1e-10, abs=1e-10)
                    nu = size - p_t
                    assert row.c1_ratio == pytest.approx(
                        math.exp(log_r) / tau ** (beta2 * nu / 2), rel=1e-9)
                    assert row.c2_margin == pytest.approx(
                        log_r - lam ** beta3 - nu * math.log(1 + tau),
                        rel=1e-9, abs=1e-9)

    def test_parameter_validation(self):
        prior = UniformPrior(10, 5)
        with pytest.raises(ValueError):
            consistency_diagnostics(prior, tau=-1.0, p_t=2, lam=10.0)
        with pytest.raises(ValueError):
            consistency_diagnostics(prior, tau=10.0, p_t=2, lam=10.0, beta2=1.5)
        with pytest.raises(ValueError):
            consistency_diagnostics(prior, tau=10.0, p_t=9, lam=10.0)
