
import numpy as np
import pytest

from kcut import analysis as an
from kcut import distributions as d
from kcut.errors import DimensionMismatch

from conftest import random_pmf


def point_mass(n, at):
    mass = np.zeros(n)
    mass[at] = 1.0
    return d.CutSizeDistribution(n, mass)


# --- convolution ------------------------------------------------------------

def test_convolve_point_masses():
    out = an.convolve_cyclic(point_mass(5, 2), point_mass(5, 3))
    assert out.mass[0] == pytest.approx(1.0)
    assert out.mass[1:].sum() == pytest.approx(0.0)


def test_uniform_is_absorbing(table1_pmf):
    u = d.uniform_pmf(150)
    out = an.convolve_cyclic(u, table1_pmf)
    assert np.allclose(out.mass, u.mass, atol=1e-15)


def test_convolve_two_coin_flips():
    # (0.5, 0.5, 0, 0) with itself on n=4: enumerate the four outcome pairs
    p = d.CutSizeDistribution(4, np.array([0.5, 0.5, 0.0, 0.0]))
    out = an.convolve_cyclic(p, p)
    assert np.allclose(out.mass, [0.25, 0.5, 0.25, 0.0])


def test_fast_convolution_matches_reference():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(2, 150))
        p = random_pmf(rng, n)
        q = random_pmf(rng, n)
        ref = an.convolve_cyclic_reference(p, q)
        fast = an.convolve_cyclic(
            d.CutSizeDistribution(n, p), d.CutSizeDistribution(n, q)
        )
        assert np.abs(fast.mass - ref).max() < 1e-10


def test_convolution_commutative_associative():
    rng = np.random.default_rng(6)
    for _ in range(15):
        n = int(rng.integers(2, 64))
        p, q, r = (d.CutSizeDistribution(n, random_pmf(rng, n)) for _ in range(3))
        pq = an.convolve_cyclic(p, q)
        qp = an.convolve_cyclic(q, p)
        assert np.abs(pq.mass - qp.mass).max() < 1e-10
        left = an.convolve_cyclic(pq, r)
        right = an.convolve_cyclic(p, an.convolve_cyclic(q, r))
        assert np.abs(left.mass - right.mass).max() < 1e-10


def test_convolve_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        an.convolve_cyclic(d.uniform_pmf(4), d.uniform_pmf(5))


# --- iterate_k ---------------------------------------------------------------

def test_iterate_k_identity(table1_pmf):
    rot = an.iterate_k(table1_pmf, 1)
    assert np.array_equal(rot.mass, table1_pmf.mass)
    with pytest.raises(ValueError):
        an.iterate_k(table1_pmf, 0)


def test_iterate_k_matches_sequential(table1_pmf):
    seq = table1_pmf.mass
    for k in range(2, 17):
        seq = an.convolve_cyclic(
            d.CutSizeDistribution(150, seq), table1_pmf
        ).mass
        fast = an.iterate_k(table1_pmf, k)
        assert np.abs(fast.mass - seq).max() < 1e-10


def test_iterate_k_additive():
    rng = np.random.default_rng(7)
    p = d.CutSizeDistribution(40, random_pmf(rng, 40, full_support=True))
    for a, b in [(1, 1), (2, 3), (4, 4), (5, 2)]:
        lhs = an.iterate_k(p, a + b).mass
        rhs = an.convolve_cyclic(
            d.CutSizeDistribution(40, an.iterate_k(p, a).mass),
            d.CutSizeDistribution(40, an.iterate_k(p, b).mass),
        ).mass
        assert np.abs(lhs - rhs).max() < 1e-10


def test_iterate_k_reference_cells(table1_pmf):
    u = d.uniform_pmf(150)
    got = an.variation_distance(an.iterate_k(table1_pmf, 6), u)
    assert got == pytest.approx(0.000719, abs=1e-6)
    tu = d.discretize(d.TABLE1_TRUNCATED_UNIFORM, 150)
    got = an.variation_distance(an.iterate_k(tu, 2), u)
    assert got == pytest.approx(0.0576, abs=1e-4)


# --- divergences -------------------------------------------------------------

def test_variation_distance_basics():
    u2 = d.uniform_pmf(2)
    assert an.variation_distance(u2, u2) == 0.0
    assert an.variation_distance(point_mass(2, 0), u2) == pytest.approx(0.5)
    tu = d.discretize(d.TABLE1_TRUNCATED_UNIFORM, 150)
    assert an.variation_distance(tu, d.uniform_pmf(150)) == pytest.approx(36 / 150, abs=1e-12)


def test_variation_distance_symmetry_and_triangle():
    rng = np.random.default_rng(8)
    for _ in range(25):
        n = int(rng.integers(2, 40))
        p, q, r = (random_pmf(rng, n) for _ in range(3))
        dpq = an.variation_distance(p, q)
        assert dpq == pytest.approx(an.variation_distance(q, p), abs=1e-14)
        assert dpq == pytest.approx(0.5 * np.abs(p - q).sum(), abs=1e-14)
        assert dpq <= an.variation_distance(p, r) + an.variation_distance(r, q) + 1e-12


def test_epsilon_ratio(table1_pmf):
    assert an.epsilon_ratio(d.uniform_pmf(150)) == pytest.approx(0.0, abs=1e-12)
    assert an.epsilon_ratio(table1_pmf) == pytest.approx(1.5, abs=1e-12)
    tu = d.discretize(d.TABLE1_TRUNCATED_UNIFORM, 150)
    assert an.epsilon_ratio(tu) == pytest.approx(150 / 114 - 1, abs=1e-12)


def test_epsilon_ratio_nonincreasing_for_section4_models(table1_pmf):
    sources = [
        table1_pmf,
        d.discretize(d.TABLE1_TRUNCATED_UNIFORM, 150),
        d.discretize(d.TABLE1_EXPONENTIAL_CUBIC, 150),
    ]
    for src in sources:
        eps = [an.epsilon_ratio(an.iterate_k(src, k)) for k in range(1, 17)]
        assert all(a >= b - 1e-12 for a, b in zip(eps, eps[1:]))


def test_full_support_converges_below_1e6():
    rng = np.random.default_rng(9)
    for _ in range(5):
        n = int(rng.integers(2, 150))
        p = d.CutSizeDistribution(n, random_pmf(rng, n, full_support=True))
        u = d.uniform_pmf(n)
        assert any(
            an.variation_distance(an.iterate_k(p, k), u) < 1e-6
            for k in (8, 16, 32, 64)
        )


# --- convergence table -------------------------------------------------------

def test_convergence_table_uniform_source():
    table = an.convergence_table([d.uniform_pmf(20)], 5)
    for r in table.rows[0]:
        assert r.vd == pytest.approx(0.0, abs=1e-12)
        assert r.eps == pytest.approx(0.0, abs=1e-12)
    assert table.vd_monotone == (True,)


def test_convergence_table_point_mass_stays_point_mass():
    table = an.convergence_table([point_mass(150, 1)], 6)
    assert table.rows[0][5].vd == pytest.approx(149 / 150, abs=1e-12)


def test_convergence_table_errors():
    with pytest.raises(ValueError):
        an.convergence_table([], 4)
    with pytest.raises(DimensionMismatch):
        an.convergence_table([d.uniform_pmf(3), d.uniform_pmf(4)], 2)


def test_vd_monotone_flag(table1_pmf):
    table = an.convergence_table([table1_pmf], 16)
    assert table.vd_monotone == (True,)


def test_empirical_rate(table1_pmf):
    table = an.convergence_table(
        [
            table1_pmf,
            d.discretize(d.TABLE1_TRUNCATED_UNIFORM, 150),
            d.discretize(d.TABLE1_EXPONENTIAL_CUBIC, 150),
        ],
        16,
        labels=["empirical", "truncu", "expcubic"],
    )
    ratios = an.empirical_rate(table, 0)
    # ratio between the k=5 and k=6 rows
    assert ratios[4] == pytest.approx(0.000719 / 0.00223, rel=0.02)
    ratios_tu = an.empirical_rate(table, 1)
    assert ratios_tu[5] == pytest.approx(0.000102 / 0.000357, rel=0.02)
    # exponential decay: ratios for k >= 2 vary by less than a factor of 2
    for idx in range(3):
        rs = [r for r in an.empirical_rate(table, idx)[1:] if r is not None]
        assert max(rs) / min(rs) < 2.0


def test_empirical_rate_uniform_absent():
    table = an.convergence_table([d.uniform_pmf(10)], 5)
    assert all(r is None for r in an.empirical_rate(table, 0))


def test_render_formats(table1_pmf):
    table = an.convergence_table([table1_pmf], 3, labels=["empirical"])
    csv_text = an.format_csv(table)
    assert csv_text.splitlines()[0] == "k,model,vd,eps"
    assert "1,empirical,0.247,1.5" in csv_text
    md = an.format_markdown(table)
    assert md.startswith("| k |")
    assert "0.247" in md
