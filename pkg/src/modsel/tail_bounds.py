"""Finite-sample tail inequalities and bounds on their threshold integrals.

Chernoff bounds for central and noncentral chi-square tails, two-term bounds
for F-ratio tails, a moment bound for F survival, closed-form bounds on
integrals of such tails against the logistic threshold map
u -> d*log(g/(1/u - 1)), and the assembly that turns a pointwise tail bound
into a bound on an expected posterior probability.

Every routine certifies an upper bound.  Results clamp to 1 instead of
raising when a lemma's domain is violated, because the global evaluators sum
thousands of these terms and must not abort; the `applicable` flag records
whether the stated domain held.  A clamped or vacuous value of 1 is still a
correct bound on a probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

__all__ = [
    "TailResult",
    "QuadratureError",
    "chisq_right",
    "chisq_left",
    "ncchisq_optimal_s",
    "ncchisq_left",
    "ncchisq_right",
    "f_right",
    "f_left",
    "f_moment",
    "int_exp_tails",
    "int_poly_tails",
    "chisq_tail_integral",
    "f_tail_integral",
    "expected_pp_bound",
]

_SQRT3_GAP = 2.0 - math.sqrt(3.0)


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not converge.

    `partial` carries the assembled bound built from the non-converged
    integral estimate, already clamped to [0, 1].
    """

    def __init__(self, message: str, partial: float):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class TailResult:
    """A certified tail bound.

    bound is in [0, 1].  applicable is False when the inequality's stated
    domain was violated; the reported bound is then the vacuous 1 (or an
    exact 0 for events of empty support, which needs no domain).  param
    records the free parameter actually used where the inequality offers a
    choice.
    """

    bound: float
    applicable: bool
    param: Optional[float] = None


def _clamped(log_bound: float) -> float:
    if math.isnan(log_bound):
        return 1.0
    return math.exp(min(log_bound, 0.0))


def _check_positive(value: float, name: str) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be positive")


def _minimize(fn: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    # Bounded scalar minimization (golden-section with parabolic steps),
    # xatol 1e-8; never evaluates outside [lo, hi].
    res = optimize.minimize_scalar(
        fn, bounds=(lo, hi), method="bounded", options={"xatol": 1e-8}
    )
    return float(res.x), float(res.fun)


def _log_chisq_chernoff(nu: float, w: float) -> float:
    # log of (e w / nu)^{nu/2} e^{-w/2}; the tightest Chernoff value for a
    # central chi-square, shared by both tails.
    return 0.5 * nu * (1.0 + math.log(w / nu)) - 0.5 * w


def chisq_right(nu: float, w: float) -> TailResult:
    """Bound P(chisq_nu > w) for w > nu."""
    _check_positive(nu, "nu")
    if w <= nu:
        return TailResult(1.0, False)
    return TailResult(_clamped(_log_chisq_chernoff(nu, w)), True)


def chisq_left(nu: float, w: float) -> TailResult:
    """Bound P(chisq_nu < w) for w < nu; same Chernoff value, mirrored domain."""
    _check_positive(nu, "nu")
    if w <= 0.0:
        return TailResult(0.0, True)
    if w >= nu:
        return TailResult(1.0, False)
    return TailResult(_clamped(_log_chisq_chernoff(nu, w)), True)


def ncchisq_optimal_s(nu: float, lam: float, w: float) -> float:
    """Stationary point of the noncentral chi-square MGF exponent.

    Negative exactly when w < lam + nu (left-tail regime); in (0, 1/2)
    exactly when w > lam + nu (right-tail regime).
    """
    _check_positive(nu, "nu")
    _check_positive(w, "w")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    return 0.5 - nu / (4.0 * w) - 0.5 * math.sqrt(nu**2 / (4.0 * w**2) + lam / w)


def _log_ncchisq_mgf(nu: float, lam: float, w: float, s: float) -> float:
    # log of exp{lam*s/(1-2s) - s*w} / (1-2s)^{nu/2}, any s < 1/2.
    return lam * s / (1.0 - 2.0 * s) - s * w - 0.5 * nu * math.log1p(-2.0 * s)


def ncchisq_left(
    nu: float, lam: float, w: float, s: Optional[float] = None, variant: str = "closed"
) -> TailResult:
    """Bound P(chisq_nu(lam) <= w) below the noncentrality.

    The default evaluates the closed choice s = 1/2 - sqrt(lam/w)/2, giving
    exp{-(sqrt(lam)-sqrt(w))^2/2} (w/lam)^{nu/4}; an explicit s < 0 evaluates
    the general moment-generating bound at that s, and variant="optimal"
    minimizes it numerically.  Stated domain: w < lam.
    """
    _check_positive(nu, "nu")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if w <= 0.0:
        return TailResult(0.0, True)
    in_domain = w < lam
    if s is not None:
        if s >= 0.0:
            return TailResult(1.0, False, s)
        return TailResult(_clamped(_log_ncchisq_mgf(nu, lam, w, s)), in_domain, s)
    if variant == "closed":
        if not in_domain:
            return TailResult(1.0, False)
        s_closed = 0.5 - 0.5 * math.sqrt(lam / w)
        log_b = -0.5 * (math.sqrt(lam) - math.sqrt(w)) ** 2 + 0.25 * nu * math.log(w / lam)
        return TailResult(_clamped(log_b), True, s_closed)
    if variant == "optimal":
        s_star = ncchisq_optimal_s(nu, lam, w)
        if s_star >= 0.0:
            return TailResult(1.0, False)
        s_hat, log_b = _minimize(
            lambda t: _log_ncchisq_mgf(nu, lam, w, t), 2.0 * s_star - 1.0, -1e-12
        )
        return TailResult(_clamped(log_b), in_domain, s_hat)
    raise ValueError(f"unknown variant {variant!r}")


def ncchisq_right(
    nu: float, lam: float, w: float, variant: str = "sqrt_choice"
) -> TailResult:
    """Bound P(chisq_nu(lam) > w) above lam + nu.

    sqrt_choice takes s = (1 - sqrt(lam/w))/2 and is tight when the
    noncentrality dominates; nu_choice takes s = 1/2 - nu/(2w), reduces
    exactly to the central bound at lam = 0, and is preferred when nu
    dominates; optimal minimizes the exponent over s in (0, 1/2).
    """
    _check_positive(nu, "nu")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    in_domain = w > lam + nu
    if variant == "sqrt_choice":
        if lam <= 0.0 or w <= lam:
            return TailResult(1.0, False)
        s_c = 0.5 * (1.0 - math.sqrt(lam / w))
        log_b = -0.5 * w * (1.0 - math.sqrt(lam / w)) ** 2 + 0.25 * nu * math.log(w / lam)
        return TailResult(_clamped(log_b), in_domain, s_c)
    if variant == "nu_choice":
        if w <= nu:
            return TailResult(1.0, False)
        s_c = 0.5 - nu / (2.0 * w)
        log_b = _log_chisq_chernoff(nu, w) - 0.5 * lam + 0.5 * w * lam / nu
        return TailResult(_clamped(log_b), in_domain, s_c)
    if variant == "optimal":
        if w <= 0.0:
            return TailResult(1.0, False)
        s_hat, log_b = _minimize(
            lambda s: _log_ncchisq_mgf(nu, lam, w, s), 1e-12, 0.5 - 1e-9
        )
        return TailResult(_clamped(log_b), in_domain, s_hat)
    raise ValueError(f"unknown variant {variant!r}")


def _log_denominator_left(nu2: float, s: float) -> float:
    # log of (e s)^{nu2/2} e^{-s nu2/2}: the denominator chi-square leaving
    # [s*nu2, inf), valid for 0 < s < 1.
    return -0.5 * nu2 * (s - 1.0 - math.log(s))


def _log_numerator_right(nu1: float, lam: float, ws: float) -> float:
    # Best available Chernoff value for P(chisq_nu1(lam) > ws), clamped at
    # log 1 when no admissible parameter exists.
    if lam == 0.0:
        if ws <= nu1:
            return 0.0
        return min(0.0, _log_chisq_chernoff(nu1, ws))
    t_star = ncchisq_optimal_s(nu1, lam, ws)
    if t_star <= 0.0:
        return 0.0
    return min(0.0, _log_ncchisq_mgf(nu1, lam, ws, t_star))


def f_right(
    nu1: float,
    nu2: float,
    lam: float,
    w: float,
    s: Optional[float] = None,
    variant: str = "corollary",
) -> TailResult:
    """Bound P(nu1 * W > w) for W a possibly noncentral F(nu1, nu2) ratio.

    The threshold is on nu1*W, the chi-square-scale statistic that the
    Bayes-factor comparisons produce.  The bound splits the event at the
    denominator: for any s in (0, 1),

        P(nu1 W > w) <= P(chisq_nu1(lam) > w s) + P(chisq_nu2 < s nu2),

    each term bounded by its Chernoff value.  An explicit s evaluates that
    decomposition directly.  The default closed form fixes the implicit
    s = 1 - sqrt(2w/nu2), valid on w in ((nu1+lam)/(2-sqrt(3)), nu2) with
    nu2 > nu1/(2-sqrt(3)); variant="optimal" searches s numerically.
    """
    _check_positive(nu1, "nu1")
    _check_positive(nu2, "nu2")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if w <= 0.0:
        return TailResult(1.0, False)
    if s is not None:
        if not 0.0 < s < 1.0:
            return TailResult(1.0, False, s)
        lower = (lam + nu1) / w
        log_b = np.logaddexp(
            _log_numerator_right(nu1, lam, w * s), _log_denominator_left(nu2, s)
        )
        return TailResult(_clamped(float(log_b)), s > lower, s)
    if variant == "corollary":
        in_domain = (
            nu2 > nu1 / _SQRT3_GAP and (nu1 + lam) / _SQRT3_GAP < w < nu2
        )
        fac = 1.0 - math.sqrt(2.0 * w / nu2)
        if fac <= 0.0:
            # implicit s collapses; 1 is the only certified value here
            return TailResult(1.0, in_domain, fac)
        if lam == 0.0:
            log_num = 0.5 * nu1 * (1.0 + math.log(w / nu1)) - 0.5 * w * fac
        else:
            log_num = (
                0.25 * nu1 * math.log(w / lam)
                - 0.5 * w * fac * (1.0 - math.sqrt(lam / (w * fac))) ** 2
            )
        log_b = np.logaddexp(log_num, -0.5 * w)
        return TailResult(_clamped(float(log_b)), in_domain, fac)
    if variant == "optimal":
        lower = (lam + nu1) / w
        if lower >= 1.0:
            return TailResult(1.0, False)

        def objective(s_val: float) -> float:
            return float(
                np.logaddexp(
                    _log_numerator_right(nu1, lam, w * s_val),
                    _log_denominator_left(nu2, s_val),
                )
            )

        s_hat, log_b = _minimize(objective, lower + 1e-12, 1.0 - 1e-12)
        return TailResult(_clamped(log_b), True, s_hat)
    raise ValueError(f"unknown variant {variant!r}")


def f_left(
    nu1: float,
    nu2: float,
    lam: float,
    w: float,
    s: float,
    t: Optional[float] = None,
    variant: str = "closed",
) -> TailResult:
    """Bound P(nu1 * W < w) for a noncentral F(nu1, nu2) ratio.

    Splits at the denominator with a user-chosen s >= 1:

        P(nu1 W < w) <= P(chisq_nu1(lam) < w s) + P(chisq_nu2 > s nu2).

    The numerator term uses the left-tail moment-generating bound at t < 0;
    by default t = 1/2 - sqrt(lam/(ws))/2 when ws < lam, falling back to the
    stationary point when that is still negative, and variant="optimal"
    minimizes over t.  param reports the t used.
    """
    _check_positive(nu1, "nu1")
    _check_positive(nu2, "nu2")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if w <= 0.0:
        return TailResult(0.0, True)
    if s < 1.0:
        return TailResult(1.0, False)
    if t is None:
        if variant == "closed":
            if w * s < lam:
                t = 0.5 - 0.5 * math.sqrt(lam / (w * s))
            else:
                t_star = ncchisq_optimal_s(nu1, lam, w * s)
                t = t_star if t_star < 0.0 else None
        elif variant == "optimal":
            t_star = ncchisq_optimal_s(nu1, lam, w * s)
            if t_star < 0.0:
                t, _ = _minimize(
                    lambda v: _log_ncchisq_mgf(nu1, lam, w * s, v),
                    2.0 * t_star - 1.0,
                    -1e-12,
                )
            else:
                t = None
        else:
            raise ValueError(f"unknown variant {variant!r}")
    elif t >= 0.0:
        return TailResult(1.0, False, t)
    if t is None:
        return TailResult(1.0, False)
    log_b = np.logaddexp(
        _log_ncchisq_mgf(nu1, lam, w * s, t), -0.5 * nu2 * (s - 1.0 - math.log(s))
    )
    return TailResult(_clamped(float(log_b)), True, t)


def _moment_lead(nu1: float) -> float:
    # Lead constant of the F moment bound, switching on the numerator df.
    if nu1 == 1:
        return math.exp(2.5) / (math.pi * math.sqrt(2.0))
    if nu1 == 2:
        return math.exp(2.0) / math.sqrt(2.0 * math.pi)
    if nu1 > 2:
        return math.exp(2.0) / (2.0 * math.pi)
    raise ValueError("nu1 must be 1, 2, or greater than 2")


def _log_f_moment(nu1: float, nu2: float, w: float, s: float) -> float:
    # General moment-bound display at a fixed admissible s.
    half1 = 0.5 * nu1
    half2 = 0.5 * nu2
    log_v = math.log(_moment_lead(nu1))
    log_v += s * math.log(nu2 * (s + half1 - 1.0) / (nu1 * w * (half2 - s - 1.0)))
    log_v += 0.5 * (nu1 - 1.0) * math.log(s + half1 - 1.0)
    if nu1 > 2:
        log_v -= 0.5 * (nu1 - 1.0) * math.log(half1 - 1.0)
    log_v += 0.5 * (nu2 - 1.0) * math.log(1.0 - s / (half2 - 1.0))
    return log_v


def f_moment(
    nu1: float, nu2: float, w: float, s: Optional[float] = None, variant: str = "general"
) -> TailResult:
    """Moment bound on P(W > w) for a central F(nu1, nu2) variable.

    Needs nu2 > 4 and w > nu2/(nu2-2) (beyond the mean), with the moment
    order s in [1, nu2/2 - 2].  The default order is
    min{(w-1) nu1/2 + 1, nu2/2 - 2}.  variant="regime" evaluates the
    simplified displays on either side of w = (nu1+nu2-6)/nu1 (the small-w
    display is the general bound at its regime order, keeping the two
    branches within a factor e of each other at the switch); "optimal"
    minimizes over the admissible order.
    """
    _check_positive(nu2, "nu2")
    _moment_lead(nu1)  # validates nu1
    s_max = 0.5 * nu2 - 2.0
    in_domain = nu2 > 4.0 and s_max >= 1.0 and w > nu2 / (nu2 - 2.0)
    if not in_domain:
        return TailResult(1.0, False, s)
    if s is not None:
        if not 1.0 <= s <= s_max:
            return TailResult(1.0, False, s)
        return TailResult(_clamped(_log_f_moment(nu1, nu2, w, s)), True, s)
    s_default = min((w - 1.0) * nu1 / 2.0 + 1.0, s_max)
    if variant == "general":
        return TailResult(
            _clamped(_log_f_moment(nu1, nu2, w, s_default)), True, s_default
        )
    if variant == "regime":
        if w <= (nu1 + nu2 - 6.0) / nu1:
            return TailResult(
                _clamped(_log_f_moment(nu1, nu2, w, s_default)), True, s_default
            )
        # large-threshold display at the top admissible order
        log_v = math.log(_moment_lead(nu1)) + 1.0
        log_v += (0.5 * nu2 - 2.0) * math.log((nu1 + nu2 - 6.0) / (nu1 * w))
        log_v += 0.5 * (nu1 - 1.0) * math.log(0.5 * (nu1 + nu2 - 6.0))
        if nu1 > 2:
            log_v -= 0.5 * (nu1 - 1.0) * math.log(0.5 * nu1 - 1.0)
        log_v -= 1.5 * math.log(0.5 * nu2 - 1.0)
        return TailResult(_clamped(log_v), True, s_max)
    if variant == "optimal":
        if s_max - 1.0 < 1e-9:
            return TailResult(_clamped(_log_f_moment(nu1, nu2, w, 1.0)), True, 1.0)
        s_hat, log_b = _minimize(lambda v: _log_f_moment(nu1, nu2, w, v), 1.0, s_max)
        return TailResult(_clamped(log_b), True, s_hat)
    raise ValueError(f"unknown variant {variant!r}")


def _threshold_log(g: float, u: float) -> float:
    # log of g / (1/u - 1), kept in log space since g may be astronomically
    # large at global-bound scales.
    return math.log(g) + math.log(u) - math.log1p(-u)


def int_exp_tails(
    b: float, c: float, l: float, d: float, g: float, u_lo: float, u_hi: float
) -> float:
    """Bound the integral over (u_lo, u_hi) of an exponential-type tail.

    The tail P(W > w) <= b w^c e^{-lw} is evaluated at the threshold
    w(u) = d*log(g/(1/u - 1)) and integrated in u.  The polynomial factor is
    frozen at its value at u_hi; the remaining integral closes in three
    branches by the size of ld: log(1/u_lo) when ld = 1, a u_hi-edge term
    when ld < 1, a u_lo-edge term when ld > 1.
    """
    if not 0.0 < u_lo < u_hi < 1.0:
        raise ValueError("need 0 < u_lo < u_hi < 1")
    if g < 1.0 / u_lo - 1.0:
        raise ValueError("g must be at least 1/u_lo - 1")
    _check_positive(b, "b")
    _check_positive(l, "l")
    _check_positive(d, "d")
    if c < 0:
        raise ValueError("c must be nonnegative")
    ld = l * d
    log_val = math.log(b) - ld * math.log(g)
    if c > 0:
        log_val += c * math.log(d * _threshold_log(g, u_hi))
    if ld == 1.0:
        log_val += math.log(math.log(1.0 / u_lo))
    elif ld < 1.0:
        log_val += (1.0 - ld) * (math.log(u_hi) - math.log1p(-u_hi)) - math.log1p(-ld)
    else:
        log_val += (ld - 1.0) * math.log(1.0 / u_lo - 1.0) - math.log(ld - 1.0)
    return float(np.exp(log_val))


def int_poly_tails(
    b: float, c: float, d: float, g: float, u_lo: float, u_hi: float
) -> float:
    """Bound the same threshold integral for a polynomial tail b / w^c, c > 1.

    Returns the smaller of the closed form (valid when c - 1 exceeds the
    log-threshold at u_lo) and the flat bound that freezes the tail at its
    largest value.
    """
    if not 0.0 < u_lo < u_hi < 1.0:
        raise ValueError("need 0 < u_lo < u_hi < 1")
    if g < 1.0 / u_lo - 1.0:
        raise ValueError("g must be at least 1/u_lo - 1")
    _check_positive(b, "b")
    _check_positive(d, "d")
    if not c > 1.0:
        raise ValueError("c must exceed 1")
    big_l = _threshold_log(g, u_lo)
    if big_l <= 0.0:
        return math.inf
    log_flat = math.log(b) - c * (math.log(d) + math.log(big_l))
    if c - 1.0 > big_l:
        log_closed = (
            math.log(b)
            - c * math.log(d)
            - math.log(c - 1.0)
            - (c - 1.0) * math.log(big_l)
        )
        return float(np.exp(min(log_flat, log_closed)))
    return float(np.exp(log_flat))


def chisq_tail_integral(nu: float, d: float, g: float) -> TailResult:
    """Bound the full-unit-interval integral of a chi-square threshold tail.

    Bounds u_lo + (1 - u_hi) + integral of P(chisq_nu > d*log(g/(1/u - 1)))
    with the symmetric cut u_hi = 1 - u_lo at u_lo = 1/(1 + g e^{-nu/d}).
    Needs d > 1 and log g > nu/d; the closed form switches on d versus 2
    (the d < 2 display carries a slightly larger constant than the d > 2
    one, both certified).
    """
    _check_positive(nu, "nu")
    _check_positive(d, "d")
    _check_positive(g, "g")
    log_g = math.log(g)
    if not (d > 1.0 and log_g > nu / d):
        return TailResult(1.0, False)
    term1 = 2.0 * math.exp(-float(np.logaddexp(0.0, log_g - nu / d)))
    if d == 2.0:
        log_t2 = (
            -log_g
            + math.log(float(np.logaddexp(0.0, log_g - 0.5 * nu)))
            + 0.5 * nu * (math.log(4.0 / nu) + 1.0 + math.log(log_g - 0.25 * nu))
        )
    elif d > 2.0:
        log_t2 = (
            -log_g
            + 0.5 * nu * (math.log(2.0 * d / nu) + 2.0 / d + math.log(log_g - 0.5 * nu / d))
            - math.log(0.5 * d - 1.0)
        )
    else:
        log_t2 = (
            -(d - 1.0) * log_g
            + 0.5
            * nu
            * (math.log(2.0 * d / nu) + 2.0 - 0.5 / d + math.log(log_g - 0.5 * nu / d))
            - math.log(1.0 - 0.5 * d)
        )
    bound = min(1.0, term1 + float(np.exp(log_t2)))
    return TailResult(bound, True)


def f_tail_integral(
    nu1: float, nu2: float, d: float, g: float, weight: float = 0.95
) -> TailResult:
    """Bound the unit-interval integral of an F-ratio threshold tail.

    Two certified assemblies cover complementary regimes.  When the
    denominator df is large against log g, the numerator-dominated two-term
    tail bound integrates through the exponential-tail machinery with its
    slack pinned at the largest admissible value (reported as param).  When
    log g is large against the joint df, the moment bound integrates through
    a polynomial tail; `weight` splits the cut threshold between log g and
    the df constant (no single split is canonical).  If both regimes apply
    the larger value is returned; if neither does the result is vacuous.
    """
    _check_positive(nu1, "nu1")
    _check_positive(nu2, "nu2")
    _check_positive(d, "d")
    _check_positive(g, "g")
    if not 0.0 < weight < 1.0:
        raise ValueError("weight must be in (0, 1)")
    log_g = math.log(g)
    results = []

    edge = nu1 / (d * _SQRT3_GAP)
    if nu2 > nu1 / _SQRT3_GAP and log_g > edge:
        w_max = d * (2.0 * log_g - edge)
        omega = math.sqrt(2.0 * w_max / nu2)
        if omega < 1.0:
            u_lo = math.exp(-float(np.logaddexp(0.0, log_g - edge)))
            u_hi = min(1.0 - u_lo, math.nextafter(1.0, 0.0))
            val = (
                u_lo
                + (1.0 - u_hi)
                + int_exp_tails(2.0, 0.0, 0.5 * (1.0 - omega), d, g, u_lo, u_hi)
            )
            results.append(TailResult(min(1.0, val), True, omega))

    if nu2 > 6.0 and log_g > nu1 + nu2 - 6.0:
        joint = nu1 + nu2 - 6.0
        u_lo = math.exp(-float(np.logaddexp(0.0, weight * (log_g - joint))))
        log_t2 = (
            math.log(_moment_lead(nu1))
            + 1.0
            + 0.5 * (nu1 + nu2 - 5.0) * math.log(joint)
            - 0.5 * (nu2 - 4.0)
            * math.log(d * ((1.0 - weight) * log_g + weight * joint))
        )
        val = 2.0 * u_lo + float(np.exp(log_t2))
        results.append(TailResult(min(1.0, val), True, weight))

    if not results:
        return TailResult(1.0, False)
    return max(results, key=lambda r: r.bound)


def expected_pp_bound(
    tail_fn: Callable[[float], float], u_lo: float, u_hi: float
) -> float:
    """Turn a pointwise posterior-odds tail bound into a mean bound.

    tail_fn(u) must upper-bound the probability that the relevant Bayes
    factor exceeds its prior-odds threshold at level u.  The expected
    posterior probability is then at most u_lo + (1 - u_hi) plus the
    adaptive quadrature of tail_fn over (u_lo, u_hi); the result clamps to
    [0, 1].  Raises QuadratureError (carrying the clamped partial value)
    when the quadrature reports non-convergence.
    """
    if not 0.0 <= u_lo <= u_hi <= 1.0:
        raise ValueError("need 0 <= u_lo <= u_hi <= 1")
    if u_lo == u_hi:
        return 1.0
    res = integrate.quad(tail_fn, u_lo, u_hi, limit=200, full_output=1)
    total = u_lo + (1.0 - u_hi) + res[0]
    clamped = min(1.0, max(0.0, total))
    if len(res) >= 4:
        raise QuadratureError(str(res[3]), clamped)
    return clamped
