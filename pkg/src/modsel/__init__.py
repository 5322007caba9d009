"""Posterior model probabilities, selection rates and finite-sample tail
bounds for Gaussian variable selection."""

from .core import (
    Dataset,
    ModelFit,
    ModelIndex,
    NULL_MODEL,
    NotNestedError,
    SingularModelError,
    SufficientStats,
    Truth,
    completion_eigs,
    f_statistic,
    fit_least_squares,
    noncentrality_nested,
    sandwich_eigs,
    shrinkage_moments,
)
from .coef_priors import (
    NormalV,
    PMOM,
    ZellnerKnownPhi,
    ZellnerUnknownPhi,
    evidence,
    fstat_bayes_bound_check,
    log_bf_normal_v,
    log_bf_pmom,
    log_bf_zellner_known,
    log_bf_zellner_unknown,
    log_evidence,
    pmom_evidence,
    shrunken_rss,
    tau_preset,
)
from .model_priors import (
    BetaBinomialPrior,
    ComplexityPrior,
    CustomSizeWeightsPrior,
    UniformPrior,
    consistency_diagnostics,
    make_prior,
)
from .l0 import (
    BIC,
    EBIC,
    RIC,
    make_criterion,
    normalized_l0,
    penalty,
)
from .posterior import (
    GibbsConfig,
    PosteriorSummary,
    enumerate_posterior,
    gibbs_posterior,
    orthogonal_dp_posterior,
    select,
    subset_masses,
)
from .global_bounds import (
    BoundScenario,
    BoundValue,
    FloorReport,
    FloorRow,
    RateEntry,
    SimplifiedRates,
    bound_curves,
    bound_l0,
    bound_nonspurious_large,
    bound_nonspurious_small,
    bound_spurious,
    lambda_floor,
    scenario_for_case,
    simplified_rates,
    write_curve_csv,
)
from .sim_harness import (
    Bundle,
    BundleAggregate,
    CustomMatrix,
    Equicorrelated,
    Heteroskedastic,
    InequalityCheck,
    MisspecifiedMean,
    Orthogonal,
    ReplicateDigest,
    RunResult,
    Scenario,
    SweepRow,
    correlated_study_scenario,
    emit,
    generate,
    orthogonal_study_scenario,
    run,
    run_size_sweep,
    standard_bundles,
    write_sweep_csv,
)
from .tail_bounds import (
    QuadratureError,
    TailResult,
    chisq_left,
    chisq_right,
    chisq_tail_integral,
    expected_pp_bound,
    f_left,
    f_moment,
    f_right,
    f_tail_integral,
    int_exp_tails,
    int_poly_tails,
    ncchisq_left,
    ncchisq_optimal_s,
    ncchisq_right,
)

__version__ = "0.1.0"
