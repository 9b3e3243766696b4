"""Risk-limit adjustment for approximate sampling.

Drawing s ballots from an approximate sampler instead of a uniform one
changes the audit's acceptance probability by at most

    eps1 + (1 + eps2)^s' - 1

where s' is a high-probability cap (at confidence 1 - eps1) on the
number of draws where the two samplers can disagree, and eps2 bounds
the per-ballot probability ratio against uniform, minus one. With only
the per-draw variation distance delta known, eps2 weakens to n*delta.
Subtracting the bound from the risk limit restores the risk-limiting
guarantee. Disagreement counts are dominated by Binomial(s, delta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from . import kernels
from .analysis import VD_FLOOR, epsilon_ratio, iterate_k, variation_distance
from .distributions import CutSizeDistribution, uniform_pmf
from .errors import AdjustmentExhaustsRiskLimit, BudgetUnreachable

K_SEARCH_CAP = 64
DEFAULT_EPS1_TARGET = 1e-3


@dataclass(frozen=True)
class RiskAdjustment:
    """One evaluated instance of the acceptance-probability bound."""

    s: int            # planned sample size
    delta: float      # per-draw variation distance from uniform
    eps1: float       # achieved tail mass Pr[switched draws > s_prime]
    s_prime: int      # switched-draw quantile at confidence 1 - eps1
    eps2: float       # per-ballot max probability ratio minus one
    bound: float      # total acceptance-probability change

    def __post_init__(self):
        if self.s_prime > self.s:
            raise ValueError("s_prime cannot exceed the sample size")


@dataclass(frozen=True)
class AuditParameters:
    """Risk limit, its adjusted value, and the sampling configuration.

    k is fixed before any sampling starts and never changes within a
    session; s_star caps the draws performed via k-cut.
    """

    alpha: float
    adjusted_alpha: float
    k: int
    s_star: int

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 < self.adjusted_alpha < 1.0:
            raise ValueError("adjusted alpha must lie in (0, 1)")
        if self.k < 1 or self.s_star < 1:
            raise ValueError("k and s_star must be positive")


def _binom_pmf_anchor(s: int, i: int, delta: float) -> float:
    """pmf value at i, computed in high precision.

    The log-pmf combines terms of magnitude ~1e7 that cancel down to
    O(10), so float lgamma caps accuracy near 1e-9 relative; 40 digits
    of working precision keep the anchor exact to float rounding.
    """
    with mpmath.workdps(40):
        log_pmf = (
            mpmath.loggamma(s + 1)
            - mpmath.loggamma(i + 1)
            - mpmath.loggamma(s - i + 1)
            + i * mpmath.log(delta)
            + (s - i) * mpmath.log1p(-delta)
        )
        return float(mpmath.e**log_pmf)


def binomial_survival(s: int, delta: float, s_prime: int) -> float:
    """Pr[X > s_prime] for X ~ Binomial(s, delta).

    Sums whichever side of the distribution has fewer relevant terms:
    one high-precision anchor term, exact multiplicative ratios between
    neighbors, fsum accumulation. Exact to better than 1e-12 relative
    up to s = 10^6.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    if not 0 <= s_prime <= s:
        raise ValueError("require 0 <= s_prime <= s")
    if s_prime == s:
        return 0.0
    if delta == 0.0:
        return 0.0
    if delta == 1.0:
        return 1.0  # X = s > s_prime surely
    odds = delta / (1.0 - delta)
    mode = int(s * delta)
    if s_prime >= mode:
        # upper tail directly; terms decay geometrically past the mode
        term = _binom_pmf_anchor(s, s_prime + 1, delta)
        first = term
        terms = [term]
        for i in range(s_prime + 1, s):
            term *= (s - i) / (i + 1) * odds
            terms.append(term)
            if term < 1e-20 * first:
                break
        return math.fsum(terms)
    # complement of the lower sum; survival is large, no cancellation.
    # pmf increases on 0..s_prime (below the mode), so anchor at the top
    # term and walk down until terms stop contributing.
    term = _binom_pmf_anchor(s, s_prime, delta)
    first = term
    terms = [term]
    for i in range(s_prime, 0, -1):
        term *= i / (s - i + 1) / odds
        terms.append(term)
        if term < 1e-20 * first:
            break
    return 1.0 - math.fsum(terms)


def switched_ballot_quantile(
    s: int, delta: float, eps1_target: float
) -> tuple[int, float]:
    """Smallest s' with Pr[Binomial(s, delta) > s'] <= eps1_target.

    Returns (s', achieved survival). s' = s always satisfies, so this
    never fails.
    """
    if not 0.0 < eps1_target < 1.0:
        raise ValueError("eps1 target must lie in (0, 1)")
    if delta == 0.0:
        return 0, 0.0
    lo = 0
    while lo <= s:
        surv = binomial_survival(s, delta, lo)
        if surv <= eps1_target:
            return lo, surv
        lo += 1
    return s, 0.0


def adjustment_bound(s_prime: int, eps1: float, eps2: float) -> float:
    """eps1 + (1 + eps2)^s' - 1, the ratio form of the bound."""
    if eps1 < 0 or eps2 < 0 or s_prime < 0:
        raise ValueError("arguments must be nonnegative")
    return eps1 + math.expm1(s_prime * math.log1p(eps2))


def adjustment_bound_vd(s_prime: int, eps1: float, n: int, delta: float) -> float:
    """eps1 + (1 + n*delta)^s' - 1, the looser distance-only form."""
    if eps1 < 0 or delta < 0 or s_prime < 0:
        raise ValueError("arguments must be nonnegative")
    if n < 1:
        raise ValueError("n must be positive")
    return eps1 + math.expm1(s_prime * math.log1p(n * delta))


def adjusted_risk_limit(alpha: float, bound: float) -> float:
    """alpha minus the acceptance-probability bound."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    if bound >= alpha:
        raise AdjustmentExhaustsRiskLimit(
            f"bound {bound:.4g} consumes the whole risk limit {alpha}; raise k"
        )
    return alpha - bound


def _clean_divergence(x: float) -> float:
    """Clamp float residue to exact zero so k selection is backend-stable."""
    return 0.0 if x <= VD_FLOOR else x


def evaluate_k(
    source: CutSizeDistribution,
    k: int,
    s_star: int,
    eps1_target: float = DEFAULT_EPS1_TARGET,
) -> RiskAdjustment:
    """RiskAdjustment for a fixed cut count k (ratio form of the bound)."""
    rot = iterate_k(source, k)
    uniform = uniform_pmf(source.n)
    delta = _clean_divergence(variation_distance(rot, uniform))
    eps2 = _clean_divergence(epsilon_ratio(rot))
    s_prime, eps1 = switched_ballot_quantile(s_star, delta, eps1_target)
    bound = adjustment_bound(s_prime, eps1, eps2)
    return RiskAdjustment(s=s_star, delta=delta, eps1=eps1, s_prime=s_prime, eps2=eps2, bound=bound)


def choose_k(
    source: CutSizeDistribution,
    s_star: int,
    eps1_target: float = DEFAULT_EPS1_TARGET,
    budget: float = 0.01,
) -> tuple[int, RiskAdjustment]:
    """Smallest k (<= 64) whose adjustment bound fits the budget.

    Walks k upward reusing the running convolution, so the sweep costs
    one convolution per candidate k.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    uniform = uniform_pmf(source.n)
    running = source.mass
    for k in range(1, K_SEARCH_CAP + 1):
        delta = _clean_divergence(variation_distance(running, uniform.mass))
        eps2 = _clean_divergence(epsilon_ratio(running))
        s_prime, eps1 = switched_ballot_quantile(s_star, delta, eps1_target)
        bound = adjustment_bound(s_prime, eps1, eps2)
        if bound <= budget:
            adj = RiskAdjustment(
                s=s_star, delta=delta, eps1=eps1, s_prime=s_prime, eps2=eps2, bound=bound
            )
            return k, adj
        running = kernels.convolve_cyclic(running, source.mass)
    raise BudgetUnreachable(
        f"no k <= {K_SEARCH_CAP} brings the adjustment bound under {budget}"
    )
