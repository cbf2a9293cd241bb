import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tmex.discovery import (TRUE_DAG, DirectLingam, DiscoveryConfig, PitfallDraw, causal_order,
                            distance_correlation, pitfall_data, prune_edges, shd_pitfall_trial)
from tmex.exceptions import ConfigError, DegenerateError, DimError, SmallSampleError
from tmex.measurement import MeasurementBlock, MeasurementModel, identity
from tmex.metrics import pearson
from tmex.score import oracle_score


def _dcor_direct(a, b):
    # reference: full double-centered distance matrices
    A = np.abs(a[:, None] - a[None, :])
    B = np.abs(b[:, None] - b[None, :])
    A = A - A.mean(0) - A.mean(1)[:, None] + A.mean()
    B = B - B.mean(0) - B.mean(1)[:, None] + B.mean()
    return np.sqrt((A * B).mean() / np.sqrt((A * A).mean() * (B * B).mean()))


def test_dcor_against_direct_formula():
    rng = np.random.default_rng(0)
    for _ in range(10):
        a = rng.normal(size=300)
        b = a**2 + rng.normal(size=300)
        assert distance_correlation(a, b) == pytest.approx(_dcor_direct(a, b), abs=1e-10)


def test_dcor_with_ties():
    a = np.repeat(np.arange(10.0), 5)
    b = np.tile(np.arange(5.0), 10) + a
    assert distance_correlation(a, b) == pytest.approx(_dcor_direct(a, b), abs=1e-10)


def test_dcor_examples():
    rng = np.random.default_rng(1)
    a = rng.normal(size=500)
    assert distance_correlation(a, a) == pytest.approx(1.0, abs=1e-10)
    assert max(distance_correlation(*np.random.default_rng(s).normal(size=(2, 2000))) for s in range(100)) <= 0.1
    x = rng.normal(size=2000)
    assert distance_correlation(x, x**2) >= 0.3 and abs(pearson(x, x**2)) <= 0.1


def test_dcor_errors():
    with pytest.raises(DegenerateError):
        distance_correlation(np.ones(20), np.arange(20.0))
    with pytest.raises(SmallSampleError):
        distance_correlation(np.arange(5.0), np.arange(5.0))


@given(st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_dcor_symmetric_and_bounded(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=60)
    b = np.sin(a) + rng.normal(size=60)
    d = distance_correlation(a, b)
    assert abs(d - distance_correlation(b, a)) <= 1e-12
    assert 0 <= d <= 1


def test_order_single_column():
    assert causal_order(np.random.default_rng(0).normal(size=(300, 1))) == [0]


def test_independent_columns_give_no_edges():
    X = np.random.default_rng(0).uniform(size=(2000, 2))
    assert prune_edges(causal_order(X), X).edges == frozenset()


def test_independent_pairs_rarely_get_edges():
    empty = 0
    for s in range(100):
        X = np.random.default_rng(s).uniform(size=(2000, 2))
        empty += len(prune_edges([0, 1], X).edges) == 0
    assert empty >= 90


def test_noiseless_chain_edge_kept():
    x = np.random.default_rng(0).uniform(size=500)
    assert prune_edges([0, 1], np.c_[x, 5 * x]).edges == {(0, 1)}


def test_full_recovery_with_true_order():
    # a small alpha13 next to a large alpha12 * alpha23 can push the standardized
    # z1 -> z3 coefficient under the threshold, so a few draws lose that edge
    hits = sum(prune_edges([0, 1, 2], pitfall_data(s)[1]) == TRUE_DAG for s in range(100))
    assert hits >= 90


def test_order_recovery_on_clear_non_gaussian_chain():
    hits = 0
    for s in range(20):
        rng = np.random.default_rng(s)
        x = rng.uniform(-1, 1, 2000)
        y = x + 0.5 * rng.uniform(-1, 1, 2000)
        w = 0.8 * y + 0.5 * rng.uniform(-1, 1, 2000)
        hits += causal_order(np.c_[w, x, y]) == [1, 2, 0]
    assert hits >= 18


@pytest.mark.slow
@pytest.mark.xfail(reason="residual-independence search cannot resolve the tiny-noise chain; see decisions ledger",
                   strict=False)
def test_pitfall_latent_order_recovery():
    hits = sum(causal_order(pitfall_data(s)[1]) == [0, 1, 2] for s in range(100))
    assert hits >= 90


@given(st.lists(st.floats(0.1, 10), min_size=3, max_size=3), st.integers(0, 50))
@settings(max_examples=15, deadline=None)
def test_order_invariant_to_positive_rescaling(scales, seed):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, 400)
    y = x + 0.5 * rng.uniform(-1, 1, 400)
    w = 0.8 * y + 0.5 * rng.uniform(-1, 1, 400)
    X = np.c_[x, y, w]
    assert causal_order(X * scales) == causal_order(X)


def test_order_errors():
    with pytest.raises(DimError):
        causal_order(np.zeros((300, 11)))
    with pytest.raises(SmallSampleError):
        causal_order(np.random.default_rng(0).normal(size=(100, 2)))
    with pytest.raises(ConfigError):
        DiscoveryConfig(prune_threshold=0)


def test_trial_is_deterministic_and_entangled():
    a, b = shd_pitfall_trial(3), shd_pitfall_trial(3)
    assert a == b and a["entangled"]


def test_trial_oracle_tmex_is_one():
    model = PitfallDraw.sample(0).measurement_model()
    claimed = MeasurementModel(3, tuple(MeasurementBlock((i,), 1, identity()) for i in range(3)))
    assert oracle_score(claimed, model) == 1


def test_pitfall_parameter_ranges():
    for s in range(20):
        p = PitfallDraw.sample(s)
        assert all(1 <= v <= 10 for v in (p.alpha12, p.alpha13, p.alpha23, p.gamma1, p.gamma21, p.gamma2, p.gamma3))
        assert 0.005 <= p.beta2 <= 0.02 and 0.005 <= p.beta3 <= 0.02


def test_estimator_wrapper():
    _, z, _ = pitfall_data(0, 500)
    est = DirectLingam().fit(z)
    assert est.adjacency_matrix_.shape == (3, 3)
    assert sorted(est.causal_order_) == [0, 1, 2]
