"""Tests for influence/correlation matrices and the stability falsifiers."""

import itertools
import math

import numpy as np
import pytest
from conftest import random_system

from spinmix.independence import (
    InfluenceMatrix,
    MATRIX_KINDS,
    complete_ms_falsify,
    complete_si_falsify,
    cor_inf_identity_check,
    homog_spectrum_check,
    homogenize_distribution,
    influence_matrix,
    marginal_stability_check,
    si_check,
    spectral_radius,
)
from spinmix.model import (
    DenseDistribution,
    Graph,
    Pinning,
    TwoSpinSystem,
    condition,
    flip_system,
    gibbs_distribution,
    magnetize,
)
from spinmix.uniqueness import fixed_point

# Brute-force enumeration oracle values (independent reimplementation of the
# definitions plus numpy eigensolves; see the notes ledger for provenance).
C5_HALF_FIELD_MAX_RADIUS = 0.6333333333333334
STAR3_MAX_RADII = {
    1.0: 0.6666666666666666,
    2.0: 0.8757019150440031,
    3.0: 0.9784466529896652,
    3.8: 1.029422555066056,
}
FLIPPED_C4_MAX_RATIO = 20.0 / 9.0
FLIPPED_C4_MAX_RELATIVE = 5.297304106827916


def product_distribution(p):
    """Independent spins with P[sigma_i = +1] = p_i, full support."""
    p = np.asarray(p, dtype=np.float64)
    n = p.size
    rows = np.array(list(itertools.product((-1, 1), repeat=n)), dtype=np.int8)
    mass = np.prod(np.where(rows == 1, p, 1.0 - p), axis=1)
    return DenseDistribution(n, rows, mass)


def hardcore_dist(graph, lam=1.0):
    return gibbs_distribution(TwoSpinSystem.uniform(graph, 0.0, 1.0, lam))


# ---------------------------------------------------------------------------
# matrix construction
# ---------------------------------------------------------------------------


def test_hardcore_edge_absolute_influence(hardcore_edge):
    dist = gibbs_distribution(hardcore_edge)
    m = influence_matrix(dist, "absolute_influence").matrix
    np.testing.assert_allclose(m, [[0.0, 0.5], [0.5, 0.0]], atol=1e-15)
    assert spectral_radius(influence_matrix(dist, "absolute_influence")) == pytest.approx(0.5, abs=1e-10)


def test_triangle_influence_radius(hardcore_triangle):
    dist = gibbs_distribution(hardcore_triangle)
    m = influence_matrix(dist, "absolute_influence").matrix
    expected = (np.ones((3, 3)) - np.eye(3)) / 3.0
    np.testing.assert_allclose(m, expected, atol=1e-14)
    assert spectral_radius(m) == pytest.approx(2.0 / 3.0, rel=1e-12)


def test_product_measure_matrices():
    dist = product_distribution([0.3, 0.6, 0.25])
    off = ~np.eye(3, dtype=bool)
    for kind in MATRIX_KINDS:
        m = influence_matrix(dist, kind).matrix
        assert np.max(np.abs(m[off])) <= 1e-15
    cor = influence_matrix(dist, "signed_correlation").matrix
    np.testing.assert_allclose(np.diagonal(cor), [0.7, 0.4, 0.75], atol=1e-15)


def test_signed_correlation_diagonal_is_minus_marginal():
    rng = np.random.default_rng(11)
    for _ in range(10):
        dist = gibbs_distribution(random_system(rng))
        cor = influence_matrix(dist, "signed_correlation").matrix
        minus = dist.mass @ (dist.support == -1)
        np.testing.assert_allclose(np.diagonal(cor), minus, atol=1e-14)


def test_influence_matches_direct_conditioning():
    rng = np.random.default_rng(23)
    for _ in range(30):
        dist = gibbs_distribution(random_system(rng))
        m = influence_matrix(dist, "signed_influence").matrix
        for i in range(dist.n):
            col = dist.support[:, i]
            if not ((col == 1).any() and (col == -1).any()):
                assert np.all(m[i] == 0.0)
                continue
            up = condition(dist, Pinning(((i, 1),)))
            down = condition(dist, Pinning(((i, -1),)))
            for j in range(dist.n):
                if j == i:
                    continue
                direct = (up.mass[up.support[:, j] == 1].sum()
                          - down.mass[down.support[:, j] == 1].sum())
                assert m[i, j] == pytest.approx(direct, abs=1e-12)


def test_matrix_kind_validation():
    dist = product_distribution([0.5, 0.5])
    with pytest.raises(ValueError):
        influence_matrix(dist, "influence")
    with pytest.raises(ValueError):
        InfluenceMatrix(np.array([[0.0, -0.1], [0.0, 0.0]]), "absolute_influence")
    with pytest.raises(ValueError):
        InfluenceMatrix(np.array([[0.5, 0.0], [0.0, 0.0]]), "signed_influence")
    with pytest.raises(ValueError):
        InfluenceMatrix(np.zeros((2, 3)), "signed_influence")


def test_pinned_rows_and_columns_vanish():
    rng = np.random.default_rng(5)
    for _ in range(10):
        dist = gibbs_distribution(random_system(rng, n_max=4))
        row = dist.support[int(rng.integers(dist.size))]
        pinned = list(range(dist.n - 1))
        cond = condition(dist, Pinning(tuple((v, int(row[v])) for v in pinned)))
        for kind in ("absolute_influence", "signed_influence"):
            m = influence_matrix(cond, kind).matrix
            assert np.max(np.abs(m[pinned, :]), initial=0.0) == 0.0
            assert np.max(np.abs(m[:, pinned]), initial=0.0) == 0.0


# ---------------------------------------------------------------------------
# spectral radius
# ---------------------------------------------------------------------------


def test_spectral_radius_examples():
    assert spectral_radius(np.array([[0.0, 0.5], [0.5, 0.0]])) == pytest.approx(0.5, abs=1e-10)
    assert spectral_radius(np.zeros((3, 3))) == 0.0


def test_spectral_radius_nilpotent_falls_back_to_dense():
    assert spectral_radius(np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(0.0, abs=1e-12)


def test_spectral_radius_matches_dense_solver():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(1, 13))
        m = rng.exponential(1.0, size=(n, n))
        dense = float(np.max(np.abs(np.linalg.eigvals(m))))
        assert spectral_radius(m) == pytest.approx(dense, rel=1e-8, abs=1e-8)


def test_spectral_radius_signed_dominance():
    rng = np.random.default_rng(13)
    for _ in range(25):
        n = int(rng.integers(2, 9))
        a = rng.normal(size=(n, n))
        dense = float(np.max(np.abs(np.linalg.eigvals(a))))
        assert spectral_radius(a) == pytest.approx(dense, rel=1e-10, abs=1e-10)
        assert spectral_radius(a) <= spectral_radius(np.abs(a)) + 1e-10


def test_spectral_radius_dimension_limit():
    with pytest.raises(ValueError):
        spectral_radius(np.zeros((65, 65)))


def test_influence_dominates_signed_on_distributions():
    rng = np.random.default_rng(31)
    for _ in range(20):
        dist = gibbs_distribution(random_system(rng))
        abs_rho = spectral_radius(influence_matrix(dist, "absolute_influence"))
        signed_rho = spectral_radius(influence_matrix(dist, "signed_influence"))
        assert signed_rho <= abs_rho + 1e-10
        abs_cor = spectral_radius(influence_matrix(dist, "absolute_correlation"))
        signed_cor = spectral_radius(influence_matrix(dist, "signed_correlation"))
        assert signed_cor <= abs_cor + 1e-10


# ---------------------------------------------------------------------------
# correlation/influence identity and homogenization
# ---------------------------------------------------------------------------


def test_cor_inf_identity_random_distributions():
    rng = np.random.default_rng(17)
    rows = np.array(list(itertools.product((-1, 1), repeat=4)), dtype=np.int8)
    for _ in range(100):
        dist = DenseDistribution.from_weights(rows, rng.exponential(1.0, size=16), 4)
        assert cor_inf_identity_check(dist)


def test_cor_inf_identity_product_measure():
    dist = product_distribution([0.4, 0.7, 0.2])
    assert cor_inf_identity_check(dist)
    inf_m = influence_matrix(dist, "signed_influence").matrix
    cor = influence_matrix(dist, "signed_correlation").matrix
    minus = np.array([0.6, 0.3, 0.8])
    np.testing.assert_allclose(inf_m, np.zeros((3, 3)), atol=1e-14)
    np.testing.assert_allclose(cor / minus[:, None], np.eye(3), atol=1e-14)


def test_cor_inf_identity_hardcore_edge(hardcore_edge):
    assert cor_inf_identity_check(gibbs_distribution(hardcore_edge))


def test_cor_inf_identity_with_constant_coordinate(hardcore_edge):
    dist = condition(gibbs_distribution(hardcore_edge), Pinning(((0, 1),)))
    assert dist.size == 1  # forces the neighbour to -1
    assert cor_inf_identity_check(dist)


def test_homogenize_structure(hardcore_edge):
    dist = gibbs_distribution(hardcore_edge)
    hom = homogenize_distribution(dist)
    assert hom.n == 4
    np.testing.assert_array_equal(hom.support[:, 2:], -hom.support[:, :2])
    assert np.all((hom.support == 1).sum(axis=1) == dist.n)
    np.testing.assert_allclose(hom.mass, dist.mass)


def test_homog_spectrum_product_measure():
    dist = product_distribution([0.35, 0.5, 0.8])
    assert homog_spectrum_check(dist)
    hom = homogenize_distribution(dist)
    eigs = np.linalg.eigvals(influence_matrix(hom, "signed_correlation").matrix)
    np.testing.assert_allclose(np.sort(eigs.real), [0, 0, 0, 1, 1, 1], atol=1e-9)
    assert np.max(np.abs(eigs.imag)) <= 1e-9


def test_homog_spectrum_hardcore_edge(hardcore_edge):
    dist = gibbs_distribution(hardcore_edge)
    assert homog_spectrum_check(dist)
    inf_eigs = np.linalg.eigvals(influence_matrix(dist, "signed_influence").matrix)
    np.testing.assert_allclose(np.sort(inf_eigs.real), [-0.5, 0.5], atol=1e-12)
    hom = homogenize_distribution(dist)
    cor_eigs = np.linalg.eigvals(influence_matrix(hom, "signed_correlation").matrix)
    np.testing.assert_allclose(np.sort(cor_eigs.real), [0.0, 0.0, 0.5, 1.5], atol=1e-9)


def test_homog_spectrum_random_distributions():
    rng = np.random.default_rng(29)
    rows = np.array(list(itertools.product((-1, 1), repeat=3)), dtype=np.int8)
    for _ in range(50):
        dist = DenseDistribution.from_weights(rows, rng.exponential(1.0, size=8), 3)
        assert homog_spectrum_check(dist)


def test_homog_spectrum_dimension_guard():
    rows = np.vstack([np.full(9, -1, dtype=np.int8), np.full(9, 1, dtype=np.int8)])
    dist = DenseDistribution(9, rows, np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        homog_spectrum_check(dist)


# ---------------------------------------------------------------------------
# spectral-independence scans
# ---------------------------------------------------------------------------


def test_si_product_measure_zero_radius():
    dist = product_distribution([0.3, 0.5, 0.7, 0.45])
    report = si_check(dist, eta=0.1)
    assert report.max_spectral_radius <= 1e-10
    assert report.satisfied
    assert report.worst_fields is None
    falsified = complete_si_falsify(dist, eta=0.1, eps=0.5, budget=8, seed=0)
    assert falsified.max_spectral_radius <= 1e-10
    assert falsified.satisfied


def test_si_hardcore_five_cycle_exhaustive():
    dist = hardcore_dist(Graph.cycle(5), lam=0.5)
    gap = fixed_point(0.0, 1.0, 0.5, 1).gap
    ceiling = 2.0 * 18.0 / (gap / 2.0)
    report = si_check(dist, eta=ceiling)
    assert report.max_spectral_radius == pytest.approx(C5_HALF_FIELD_MAX_RADIUS, abs=1e-9)
    assert report.worst_pinning == Pinning.empty()
    assert report.satisfied
    assert report.samples_checked + report.skipped == 3 ** 5


def test_si_radius_grows_toward_criticality():
    radii = []
    for lam, frozen in STAR3_MAX_RADII.items():
        report = si_check(hardcore_dist(Graph.star(3), lam), eta=2.0)
        assert report.max_spectral_radius == pytest.approx(frozen, abs=1e-8)
        radii.append(report.max_spectral_radius)
    assert all(a < b for a, b in zip(radii, radii[1:]))


def test_si_parameter_validation():
    dist = product_distribution([0.5, 0.5])
    with pytest.raises(ValueError):
        si_check(dist, eta=0.0)
    with pytest.raises(ValueError):
        complete_si_falsify(dist, eta=-1.0, eps=0.1)
    with pytest.raises(ValueError):
        complete_si_falsify(dist, eta=1.0, eps=-0.1)


def test_complete_si_worst_field_reproduces(hardcore_triangle):
    dist = gibbs_distribution(hardcore_triangle)
    report = complete_si_falsify(dist, eta=5.0, eps=0.25, budget=6, seed=3)
    assert report.worst_fields is not None and len(report.worst_fields) == 3
    replay = si_check(magnetize(dist, np.array(report.worst_fields)), eta=5.0)
    assert replay.max_spectral_radius == pytest.approx(report.max_spectral_radius, abs=1e-12)


def test_complete_si_finds_field_driven_violation():
    dist = hardcore_dist(Graph.star(3), lam=1.0)
    baseline = si_check(dist, eta=1.0)
    assert baseline.satisfied
    report = complete_si_falsify(dist, eta=1.0, eps=3.0, budget=4, seed=1)
    assert report.max_spectral_radius >= 1.0
    assert not report.satisfied


def test_si_sampled_branch_beyond_exhaustive_cutoff():
    dist = hardcore_dist(Graph.path(9), lam=1.0)
    report = si_check(dist, eta=5.0, budget=16, seed=0)
    assert report.samples_checked == 17  # empty pinning + 16 sampled
    empty_rho = spectral_radius(influence_matrix(dist, "absolute_influence"))
    assert report.max_spectral_radius >= empty_rho - 1e-12


def test_si_report_rejects_negative_radius():
    with pytest.raises(ValueError):
        from spinmix.independence import SiReport
        SiReport(-0.5, Pinning.empty(), None, 1)


# ---------------------------------------------------------------------------
# marginal-stability scans
# ---------------------------------------------------------------------------


def test_ms_hardcore_edge(hardcore_edge):
    dist = gibbs_distribution(hardcore_edge)
    report = marginal_stability_check(dist, zeta=2.0)
    assert report.max_ratio == pytest.approx(1.0, abs=1e-12)
    assert report.max_relative_ratio == pytest.approx(2.0, abs=1e-12)
    assert report.satisfied
    i, sigma, sub = report.worst_relative_witness
    assert sigma.items == ((1 - i, -1),)
    assert sub == Pinning.empty()
    assert not marginal_stability_check(dist, zeta=1.9).satisfied


def test_ms_product_relative_part_exactly_one():
    # marginals p = 0.25 <= zeta/(1+zeta) at zeta = 1, and pinning-invariance
    # makes every R/R_S quotient exactly one (the zeta floor: S = Lambda).
    dist = product_distribution([0.25, 0.25, 0.25])
    report = marginal_stability_check(dist, zeta=1.0)
    assert report.max_ratio == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert report.max_relative_ratio == 1.0
    assert report.satisfied
    assert not marginal_stability_check(dist, zeta=0.3).satisfied


def test_ms_k33_attains_flipped_worst_case_bound():
    sys = TwoSpinSystem.uniform(Graph.biclique(3, 3), 0.0, 1.0, 1.0)
    flipped, chi = flip_system(sys)
    assert chi == 1  # hardcore never flips
    report = marginal_stability_check(gibbs_distribution(flipped), zeta=8.0)
    delta = flipped.graph.max_degree
    d = delta - 1
    lam_max = max(flipped.fields)
    bg = flipped.beta * flipped.gamma
    bound = (1.0 + lam_max * (1.0 - bg) / (lam_max * bg + flipped.gamma ** (d + 1))) ** delta
    assert bound == pytest.approx(8.0, abs=1e-12)
    assert report.max_ratio == pytest.approx(1.0, abs=1e-12)
    assert report.max_relative_ratio == pytest.approx(8.0, rel=1e-9)
    assert report.max_relative_ratio <= bound + 1e-9
    i, sigma, sub = report.worst_relative_witness
    assert len(sigma.items) == 5 and i not in sigma.domain
    assert set(sub.items) <= set(sigma.items)


def test_ms_flipped_four_cycle_within_bound():
    sys = TwoSpinSystem.uniform(Graph.cycle(4), 0.3, 0.6, 5.0)
    flipped, chi = flip_system(sys)
    assert chi == -1
    report = marginal_stability_check(gibbs_distribution(flipped), zeta=6.0)
    delta = flipped.graph.max_degree
    lam_max = max(flipped.fields)
    assert report.max_ratio == pytest.approx(FLIPPED_C4_MAX_RATIO, rel=1e-12)
    assert report.max_ratio == pytest.approx(lam_max * flipped.gamma ** -delta, rel=1e-12)
    bg = flipped.beta * flipped.gamma
    bound = (1.0 + lam_max * (1.0 - bg) / (lam_max * bg + flipped.gamma ** delta)) ** delta
    assert report.max_relative_ratio == pytest.approx(FLIPPED_C4_MAX_RELATIVE, rel=1e-9)
    assert report.max_relative_ratio <= bound + 1e-9
    assert report.satisfied


def test_ms_infinite_ratio_fails_any_zeta():
    dist = DenseDistribution.from_pairs(2, {(1, 1): 1.0, (-1, -1): 1.0, (1, -1): 1.0})
    report = marginal_stability_check(dist, zeta=100.0)
    assert math.isinf(report.max_ratio)
    assert math.isinf(report.max_relative_ratio)
    assert not report.satisfied


def test_ms_inherited_by_pinnings():
    rng = np.random.default_rng(41)
    for _ in range(10):
        dist = gibbs_distribution(random_system(rng))
        row = dist.support[int(rng.integers(dist.size))]
        k = int(rng.integers(1, dist.n))
        verts = rng.choice(dist.n, size=k, replace=False)
        pinned = condition(dist, Pinning(tuple((int(v), int(row[v])) for v in verts)))
        sub = marginal_stability_check(pinned, zeta=50.0)
        full = marginal_stability_check(dist, zeta=50.0)
        assert sub.max_ratio <= full.max_ratio + 1e-12
        assert sub.max_relative_ratio <= full.max_relative_ratio + 1e-12


def test_ms_sampled_branch_beyond_exhaustive_cutoff():
    dist = hardcore_dist(Graph.path(7), lam=1.0)
    report = marginal_stability_check(dist, zeta=3.0, budget=64, seed=0)
    assert report.samples_checked == 64
    assert 0.0 <= report.max_ratio < math.inf
    assert report.max_relative_ratio < math.inf


def test_complete_ms_product_stays_stable():
    # zeta carries an ulp of headroom: reweighting by sampled (irrational)
    # fields leaves last-digit dust on the mathematically-exact quotient 1.
    dist = product_distribution([0.25, 0.25, 0.25])
    report = complete_ms_falsify(dist, zeta=1.0 + 1e-9, budget=16, seed=0)
    assert report.max_ratio <= 1.0 / 3.0 + 1e-12
    assert report.max_relative_ratio == pytest.approx(1.0, abs=1e-12)
    assert report.satisfied


def test_complete_ms_triangle_worst_field_is_unit(hardcore_triangle):
    dist = gibbs_distribution(hardcore_triangle)
    report = complete_ms_falsify(dist, zeta=3.0, budget=24, seed=2)
    assert report.max_ratio == pytest.approx(1.0, rel=1e-12)
    assert report.max_relative_ratio == pytest.approx(3.0, rel=1e-9)
    assert report.satisfied
    np.testing.assert_allclose(report.worst_fields, np.ones(3), rtol=1e-12)
    assert not complete_ms_falsify(dist, zeta=2.9, budget=4, seed=2).satisfied


def test_ms_zeta_validation(hardcore_edge):
    dist = gibbs_distribution(hardcore_edge)
    with pytest.raises(ValueError):
        marginal_stability_check(dist, zeta=0.0)
    with pytest.raises(ValueError):
        complete_ms_falsify(dist, zeta=-1.0)
