
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from kcut import distributions as d
from kcut import risk
from kcut.errors import AdjustmentExhaustsRiskLimit, BudgetUnreachable


# --- binomial survival -------------------------------------------------------

def test_binomial_survival_exact_small():
    # s=3, delta=0.5, s'=2: only X=3 exceeds, probability 1/8
    assert risk.binomial_survival(3, 0.5, 2) == pytest.approx(0.125, rel=1e-12)


def test_binomial_survival_reference_point():
    got = risk.binomial_survival(1000, 7.19e-4, 4)
    assert got == pytest.approx(8.78e-4, rel=0.02)
    assert got == pytest.approx(stats.binom.sf(4, 1000, 7.19e-4), rel=1e-12)


def test_binomial_survival_edges():
    assert risk.binomial_survival(10, 0.0, 0) == 0.0
    assert risk.binomial_survival(10, 1.0, 9) == 1.0
    assert risk.binomial_survival(10, 1.0, 10) == 0.0
    assert risk.binomial_survival(5, 0.3, 5) == 0.0
    with pytest.raises(ValueError):
        risk.binomial_survival(10, 1.5, 0)
    with pytest.raises(ValueError):
        risk.binomial_survival(10, 0.5, 11)


@given(
    st.integers(1, 400),
    st.floats(0.0, 1.0),
    st.data(),
)
@settings(max_examples=150, deadline=None)
def test_binomial_survival_matches_scipy(s, delta, data):
    s_prime = data.draw(st.integers(0, s))
    got = risk.binomial_survival(s, delta, s_prime)
    expect = float(stats.binom.sf(s_prime, s, delta))
    assert got == pytest.approx(expect, rel=1e-9, abs=1e-300)


def test_binomial_survival_large_s_relative_accuracy():
    for s, delta, sp in [(10**6, 1e-6, 5), (10**6, 3e-4, 350), (10**5, 0.01, 1100)]:
        got = risk.binomial_survival(s, delta, sp)
        expect = float(stats.binom.sf(sp, s, delta))
        assert got == pytest.approx(expect, rel=1e-9)


# --- switched-ballot quantile --------------------------------------------------

def test_quantile_reference_point():
    sp, eps1 = risk.switched_ballot_quantile(1000, 7.19e-4, 1e-3)
    assert sp == 4
    assert eps1 == pytest.approx(8.78e-4, rel=0.02)


def test_quantile_edges():
    assert risk.switched_ballot_quantile(100, 0.0, 1e-3) == (0, 0.0)
    sp, eps1 = risk.switched_ballot_quantile(3, 0.5, 0.2)
    assert (sp, eps1) == (2, pytest.approx(0.125, rel=1e-12))
    with pytest.raises(ValueError):
        risk.switched_ballot_quantile(10, 0.1, 0.0)


def test_quantile_is_exact_argmin():
    # brute-force scan over every s' for a spread of (s, delta, target)
    cases = [
        (50, 0.02, 1e-2), (200, 0.004, 1e-3), (1000, 7.19e-4, 1e-3),
        (1000, 0.03, 1e-4), (17, 0.5, 0.3),
    ]
    for s, delta, target in cases:
        sp, eps1 = risk.switched_ballot_quantile(s, delta, target)
        survivals = [risk.binomial_survival(s, delta, i) for i in range(s + 1)]
        brute = next(i for i, v in enumerate(survivals) if v <= target)
        assert sp == brute
        assert eps1 == pytest.approx(survivals[brute], rel=1e-12)


# --- adjustment bounds ----------------------------------------------------------

def test_adjustment_bound_reference_point():
    got = risk.adjustment_bound(4, 8.78e-4, 0.00225)
    assert got == pytest.approx(9.88e-3, rel=0.02)


def test_adjustment_bound_edges():
    assert risk.adjustment_bound(3, 0.01, 0.0) == pytest.approx(0.01)
    assert risk.adjustment_bound(0, 0.02, 0.5) == pytest.approx(0.02)
    with pytest.raises(ValueError):
        risk.adjustment_bound(1, -0.1, 0.1)


def test_adjustment_bound_vd_values():
    got = risk.adjustment_bound_vd(4, 8.78e-4, 150, 7.19e-4)
    expect = 8.78e-4 + (1 + 150 * 7.19e-4) ** 4 - 1
    assert got == pytest.approx(expect, rel=1e-12)
    assert got == pytest.approx(0.508, abs=2e-3)  # why the ratio form is preferred
    assert risk.adjustment_bound_vd(5, 0.01, 200, 0.0) == pytest.approx(0.01)
    assert risk.adjustment_bound_vd(1, 0.0, 150, 2e-3) == pytest.approx(0.3, rel=1e-12)


@given(
    st.integers(0, 50), st.integers(0, 50),
    st.floats(0, 0.1), st.floats(0, 0.1),
    st.floats(0, 0.05), st.floats(0, 0.05),
)
@settings(max_examples=100, deadline=None)
def test_adjustment_bound_monotone(sp1, sp2, e11, e12, e21, e22):
    lo = risk.adjustment_bound(min(sp1, sp2), min(e11, e12), min(e21, e22))
    hi = risk.adjustment_bound(max(sp1, sp2), max(e11, e12), max(e21, e22))
    assert lo <= hi + 1e-15


def test_adjusted_risk_limit():
    assert risk.adjusted_risk_limit(0.05, 9.88e-3) == pytest.approx(0.04012)
    assert risk.adjusted_risk_limit(0.05, 0.0) == 0.05
    with pytest.raises(AdjustmentExhaustsRiskLimit):
        risk.adjusted_risk_limit(0.05, 0.06)
    with pytest.raises(AdjustmentExhaustsRiskLimit):
        risk.adjusted_risk_limit(0.05, 0.05)


# --- choose_k --------------------------------------------------------------------

def test_choose_k_reference_scenario(table1_pmf):
    k, adj = risk.choose_k(table1_pmf, 1000, eps1_target=1e-3, budget=0.01)
    assert k == 6
    assert adj.bound <= 0.01
    assert adj.s_prime == 4
    assert adj.delta == pytest.approx(7.19e-4, rel=0.01)
    assert adj.eps2 == pytest.approx(0.00225, rel=0.01)
    # minimality: the bound at k=5 exceeds the budget
    adj5 = risk.evaluate_k(table1_pmf, 5, 1000, eps1_target=1e-3)
    assert adj5.bound > 0.01


def test_choose_k_uniform_source():
    k, adj = risk.choose_k(d.uniform_pmf(150), 1000, budget=1e-9)
    assert k == 1
    assert adj.bound == 0.0
    assert adj.eps1 == 0.0
    assert adj.s_prime == 0


def test_choose_k_tight_budget_matches_sweep_oracle(table1_pmf):
    budget = 1e-6
    k, adj = risk.choose_k(table1_pmf, 1000, eps1_target=1e-3, budget=budget)
    # independent sweep using evaluate_k only
    expect = next(
        kk for kk in range(1, 65)
        if risk.evaluate_k(table1_pmf, kk, 1000, 1e-3).bound <= budget
    )
    assert k == expect
    assert k > 6
    assert risk.evaluate_k(table1_pmf, k - 1, 1000, 1e-3).bound > budget


def test_choose_k_nonincreasing_in_budget(table1_pmf):
    budgets = [1e-6, 1e-4, 1e-2, 0.5]
    ks = [risk.choose_k(table1_pmf, 1000, budget=b)[0] for b in budgets]
    assert ks == sorted(ks, reverse=True)


def test_choose_k_budget_unreachable():
    # a point mass never mixes: every k yields the same point distribution
    import numpy as np

    mass = np.zeros(10)
    mass[1] = 1.0
    src = d.CutSizeDistribution(10, mass)
    with pytest.raises(BudgetUnreachable):
        risk.choose_k(src, 100, budget=1e-3)


def test_risk_adjustment_invariant():
    with pytest.raises(ValueError):
        risk.RiskAdjustment(s=10, delta=0.1, eps1=0.0, s_prime=11, eps2=0.0, bound=0.0)


def test_audit_parameters_validation():
    with pytest.raises(ValueError):
        risk.AuditParameters(alpha=0.0, adjusted_alpha=0.04, k=6, s_star=100)
    with pytest.raises(ValueError):
        risk.AuditParameters(alpha=0.05, adjusted_alpha=0.04, k=0, s_star=100)
