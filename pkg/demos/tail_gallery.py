#!/usr/bin/env python3
"""Print each closed-form tail bound next to the exact scipy probability."""
import math

from scipy import integrate
from scipy.stats import chi2, f as fdist, ncf, ncx2

from modsel import (
    chisq_left,
    chisq_right,
    chisq_tail_integral,
    f_moment,
    f_right,
    f_tail_integral,
    ncchisq_left,
    ncchisq_right,
)


def row(label, result, exact):
    if not result.applicable:
        print(f"  {label:<34} not applicable")
        return
    ratio = result.bound / exact if exact > 0 else float("inf")
    print(f"  {label:<34} bound={result.bound:.4e}  "
          f"exact={exact:.4e}  ratio={ratio:8.2f}")


print("central chi-squared, nu=5:")
for w in (8.0, 15.0, 30.0):
    row(f"right tail  w={w:g}", chisq_right(5.0, w), chi2.sf(w, 5))
for w in (2.5, 1.0, 0.3):
    row(f"left tail   w={w:g}", chisq_left(5.0, w), chi2.cdf(w, 5))

print()
print("noncentral chi-squared, nu=5 lambda=25:")
for w in (45.0, 75.0, 150.0):
    exact = ncx2.sf(w, 5, 25)
    for variant in ("sqrt_choice", "nu_choice", "optimal"):
        row(f"right w={w:g} [{variant}]",
            ncchisq_right(5.0, 25.0, w, variant=variant), exact)
for w in (12.0, 6.0):
    row(f"left  w={w:g} [closed]", ncchisq_left(5.0, 25.0, w),
        ncx2.cdf(w, 5, 25))

print()
print("F right tail and moment bound (thresholds live on nu1*F):")
nu1, nu2, lam = 3.0, 60.0, 10.0
for w in (25.0, 40.0):
    row(f"ncF right w={w:g} [corollary]", f_right(nu1, nu2, lam, w),
        ncf.sf(w / nu1, nu1, nu2, lam))
for w in (3.0, 8.0):
    row(f"central F moment w={w:g}", f_moment(nu1, nu2, w),
        fdist.sf(w, nu1, nu2))

print()
print("integrated tails over a log-odds threshold curve:")
d, g = 2.0, 1e4
thr = lambda u: d * (math.log(g) + math.log(u) - math.log1p(-u))
exact = integrate.quad(lambda u: chi2.sf(max(thr(u), 0.0), 2), 0, 1,
                       limit=300)[0]
row(f"chisq integral  d={d:g} g={g:g}", chisq_tail_integral(2.0, d, g), exact)
exact = integrate.quad(lambda u: fdist.sf(max(thr(u), 0.0) / 2.0, 2, 100),
                       0, 1, limit=300)[0]
row(f"F integral      d={d:g} g={g:g}",
    f_tail_integral(2.0, 100.0, d, g), exact)
