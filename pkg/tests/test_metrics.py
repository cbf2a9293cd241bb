import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from tmex.exceptions import DegenerateError, ShapeError
from tmex.metrics import ks_statistic, ks_uniform, mann_whitney_u, mcc, pearson, r2_score, shd, spearman
from tmex.scm import Dag


def test_r2_perfect_predictor():
    rng = np.random.default_rng(0)
    z = rng.normal(size=500)
    assert r2_score(z, np.c_[rng.normal(size=500), z]) >= 0.999
    assert r2_score(z, z[:, None]) >= 0.999


def test_r2_independent():
    vals = []
    for s in range(100):
        rng = np.random.default_rng(s)
        vals.append(r2_score(rng.normal(size=2000), rng.normal(size=(2000, 2)), seed=s))
    assert max(vals) <= 0.05


def test_r2_chain_pitfall():
    rng = np.random.default_rng(1)
    z1 = rng.normal(size=20_000)
    z2 = z1 + rng.normal(size=20_000)
    assert 0.45 <= r2_score(z2, z1[:, None]) <= 0.55


def test_r2_degenerate():
    with pytest.raises(DegenerateError):
        r2_score(np.ones(50), np.random.default_rng(0).normal(size=(50, 1)))


def test_correlation_examples():
    a = np.random.default_rng(0).normal(size=1000)
    assert pearson(a, a) == pytest.approx(1.0) and spearman(a, a) == pytest.approx(1.0)
    assert pearson(a, -a) == pytest.approx(-1.0) and spearman(a, -a) == pytest.approx(-1.0)
    assert abs(spearman(a, a**3) - 1.0) <= 1e-12
    assert pearson(a, a**3) < 1.0


def test_correlation_against_scipy():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=200), rng.integers(0, 5, 200).astype(float)
    assert pearson(a, b) == pytest.approx(stats.pearsonr(a, b)[0], abs=1e-12)
    assert spearman(a, b) == pytest.approx(stats.spearmanr(a, b)[0], abs=1e-12)


def test_correlation_constant():
    with pytest.raises(DegenerateError):
        pearson(np.ones(10), np.arange(10.0))


def test_mcc_identity_and_reversal():
    z = np.random.default_rng(0).normal(size=(300, 4))
    res = mcc(z, z)
    assert res.score == pytest.approx(1.0) and res.permutation == (0, 1, 2, 3)
    res = mcc(z, z[:, ::-1])
    assert res.score == pytest.approx(1.0) and res.permutation == (3, 2, 1, 0)


def test_mcc_pitfall_near_deterministic_chain():
    rng = np.random.default_rng(0)
    z1 = rng.normal(size=5000)
    z2 = 2 * z1 + 0.01 * rng.normal(size=5000)
    z3 = 3 * z2 + 0.01 * rng.normal(size=5000)
    z = np.c_[z1, z2, z3]
    zhat = np.c_[2 * z1, z2 + z3, z2 - 0.5 * z3]
    assert mcc(z, zhat).score >= 0.98


def test_mcc_width_mismatch():
    with pytest.raises(ShapeError):
        mcc(np.zeros((5, 2)), np.zeros((5, 3)))


def test_mcc_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(20):
        z = rng.normal(size=(100, 4))
        zhat = z @ rng.normal(size=(4, 4)) + rng.normal(size=(100, 4))
        C = np.abs(mcc(z, zhat).correlation_matrix)
        best = max(np.mean(C[np.arange(4), list(p)]) for p in itertools.permutations(range(4)))
        assert mcc(z, zhat).score == pytest.approx(best, abs=1e-12)


@given(st.permutations(range(4)), st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_mcc_invariances(perm, seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(200, 4))
    zhat = z + 0.5 * rng.normal(size=(200, 4))
    base = mcc(z, zhat).score
    assert mcc(z, zhat[:, list(perm)]).score == pytest.approx(base, abs=1e-10)
    warped = np.c_[np.exp(zhat[:, 0]), zhat[:, 1] ** 3, np.tanh(zhat[:, 2]), -zhat[:, 3]]
    assert mcc(z, warped, "spearman").score == pytest.approx(mcc(z, zhat, "spearman").score, abs=1e-10)


def test_shd_examples():
    chain = Dag(3, [(0, 1), (1, 2)])
    assert shd(chain, chain) == 0
    assert shd(chain, Dag(3)) == 2
    assert shd(Dag(2, [(0, 1)]), Dag(2, [(1, 0)])) == 1


def test_shd_node_mismatch():
    with pytest.raises(ShapeError):
        shd(Dag(2), Dag(3))


def _graph(n, bits):
    edges = []
    for (u, v), b in zip(itertools.combinations(range(n), 2), bits):
        if b == 1:
            edges.append((u, v))
        elif b == 2:
            edges.append((v, u))
    return Dag(n, edges)


graphs = st.integers(2, 6).flatmap(lambda n: st.tuples(
    *[st.lists(st.integers(0, 2), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2).map(
        lambda bits, n=n: _graph(n, bits)) for _ in range(3)]))


@given(graphs)
@settings(max_examples=200, deadline=None)
def test_shd_is_a_metric(g):
    a, b, c = g
    assert shd(a, a) == 0
    assert shd(a, b) == shd(b, a)
    assert (shd(a, b) == 0) == (a.edges == b.edges)
    assert shd(a, c) <= shd(a, b) + shd(b, c)


def test_mann_whitney_examples():
    a = np.random.default_rng(0).normal(size=50)
    assert mann_whitney_u(a, a) >= 0.9
    rng = np.random.default_rng(1)
    assert mann_whitney_u(rng.normal(1, 1, 1000), rng.normal(0, 1, 1000), "greater") < 1e-6
    assert mann_whitney_u([1.0], [2.0], "greater") >= 0.5


@pytest.mark.parametrize("alternative", ["greater", "less", "two_sided"])
def test_mann_whitney_against_scipy(alternative):
    rng = np.random.default_rng(4)
    for _ in range(20):
        a = np.round(rng.normal(0.3, 1, rng.integers(8, 60)), 1)  # rounding creates ties
        b = np.round(rng.normal(0, 1, rng.integers(8, 60)), 1)
        ref = stats.mannwhitneyu(a, b, alternative=alternative.replace("_", "-"),
                                 method="asymptotic", use_continuity=True).pvalue
        assert mann_whitney_u(a, b, alternative) == pytest.approx(ref, rel=1e-10, abs=1e-15)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=30), st.lists(st.floats(-5, 5), min_size=1, max_size=30))
@settings(max_examples=100, deadline=None)
def test_mann_whitney_symmetry(a, b):
    assert mann_whitney_u(a, b, "greater") == pytest.approx(mann_whitney_u(b, a, "less"), abs=1e-12)


def test_ks_examples():
    n = 200
    grid = (np.arange(1, n + 1) - 0.5) / n
    assert ks_statistic(grid) == pytest.approx(0.5 / n)
    assert ks_uniform(grid) > 0.99
    assert ks_uniform(np.full(50, 0.01)) < 1e-6


def test_ks_against_scipy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = rng.beta(1.2, 1, 300)
        ref = stats.kstest(p, "uniform", method="asymp")
        assert ks_statistic(p) == pytest.approx(ref.statistic, abs=1e-14)
        assert ks_uniform(p) == pytest.approx(ref.pvalue, rel=1e-6)


def test_ks_uniform_calibration():
    hits = sum(ks_uniform(np.random.default_rng(s).uniform(size=500)) > 0.01 for s in range(200))
    assert hits / 200 >= 0.98
