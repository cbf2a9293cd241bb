import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tmex.exceptions import ArityError, ConfigError, DataError, DimError
from tmex.measurement import (MeasurementBlock, MeasurementFn, MeasurementModel, MeasurementTransformer,
                              PairedDataset, adjacency, apply_measurements, corrupt_mix, identity,
                              linear_mix, make_model_abc, monotone_diffeo, realize)
from tmex.scm import sample_scm, simulation_scm


def _z(n=200, seed=0):
    return sample_scm(simulation_scm(), n, seed)


def test_adjacency_single_exclusive_block():
    m = MeasurementModel(5, (MeasurementBlock((0,), 1, identity()),))
    np.testing.assert_array_equal(adjacency(m), [[1], [0], [0], [0], [0]])


def test_adjacency_two_blocks():
    m = MeasurementModel(3, (MeasurementBlock((0,), 1, identity()),
                             MeasurementBlock((1, 2), 2, identity())))
    np.testing.assert_array_equal(adjacency(m), [[1, 0], [0, 1], [0, 1]])


def test_adjacency_all_parents():
    m = MeasurementModel(4, (MeasurementBlock((0, 1, 2, 3), 1, linear_mix([[1, 1, 1, 1]])),))
    np.testing.assert_array_equal(adjacency(m)[:, 0], np.ones(4))
    assert adjacency(m).sum(axis=0).min() >= 1


def test_identity_block_copies_parent():
    z = _z()
    ds = apply_measurements(MeasurementModel(5, (MeasurementBlock((0,), 1, identity()),)), z)
    np.testing.assert_array_equal(ds.zhat[:, 0], z[:, 0])


def test_linear_mix_example():
    z = np.array([[0.0, 2.0, 3.0, 0.0, 0.0]])
    m = MeasurementModel(5, (MeasurementBlock((1, 2), 1, linear_mix([[1, 1]])),))
    assert apply_measurements(m, z).zhat[0, 0] == 5.0


def test_monotone_diffeo_at_zero():
    f = monotone_diffeo(2.0, 0.5, 1.0)
    assert f(np.zeros((1, 1)))[0, 0] == 0.0


def test_monotone_diffeo_strictly_increasing():
    f = monotone_diffeo(1.0, 0.9, 1.0)
    rng = np.random.default_rng(0)
    t = np.sort(rng.normal(0, 3, (10_000, 2)), axis=1)
    out1, out2 = f(t[:, :1])[:, 0], f(t[:, 1:])[:, 0]
    assert np.all(out1[t[:, 0] < t[:, 1]] < out2[t[:, 0] < t[:, 1]])


def test_monotone_diffeo_rejects_non_monotone():
    with pytest.raises(ConfigError):
        monotone_diffeo(1.0, 2.0, 1.0)


def test_rank_deficient_mix_rejected():
    with pytest.raises(ConfigError):
        linear_mix([[1, 1], [2, 2]])


def test_arity_mismatch():
    with pytest.raises(ArityError):
        MeasurementBlock((0, 1), 1, linear_mix([[1, 1, 1]]))
    with pytest.raises(ArityError):
        MeasurementBlock((0,), 2, identity())


def test_wrong_latent_count():
    m = make_model_abc("A")
    with pytest.raises(DimError):
        apply_measurements(m, np.zeros((3, 4)))


def test_noiseless_measurement_is_seed_free():
    z = _z()
    m = MeasurementModel(5, (MeasurementBlock((0, 1), 2, linear_mix([[1, 2], [0, 1]])),))
    np.testing.assert_array_equal(apply_measurements(m, z, 1).zhat, apply_measurements(m, z, 99).zhat)


def test_noisy_measurement_depends_on_seed():
    z = _z()
    m = MeasurementModel(5, (MeasurementBlock((0,), 1, linear_mix([[1.0]], noise_scale=0.5)),))
    a, b = apply_measurements(m, z, 1).zhat, apply_measurements(m, z, 2).zhat
    assert not np.array_equal(a, b)
    np.testing.assert_array_equal(a, apply_measurements(m, z, 1).zhat)


def test_corrupt_mix_reproduces_model_c():
    z = _z()
    a = realize(make_model_abc("A", seed=4), z)
    c = realize(make_model_abc("C", seed=4), z)
    manual = corrupt_mix(a, 0, {1: 0.2, 2: -0.1})
    np.testing.assert_array_equal(c.zhat, manual.zhat)
    np.testing.assert_allclose(c.zhat[:, 0], a.zhat[:, 0] + 0.2 * z[:, 1] - 0.1 * z[:, 2])


def test_corrupt_mix_trivial_cases():
    z = _z()
    ds = apply_measurements(MeasurementModel(5, (MeasurementBlock((0,), 1, identity()),)), z)
    np.testing.assert_array_equal(corrupt_mix(ds, 0, {}).zhat, ds.zhat)
    np.testing.assert_array_equal(corrupt_mix(ds, 0, {0: 1}).zhat[:, 0], 2 * z[:, 0])


@given(st.dictionaries(st.integers(0, 4), st.floats(-5, 5), max_size=5))
@settings(max_examples=50, deadline=None)
def test_corrupt_mix_inverse(coefs):
    z = _z(50)
    ds = realize(make_model_abc("A"), z)
    back = corrupt_mix(corrupt_mix(ds, 0, coefs), 0, {k: -v for k, v in coefs.items()})
    np.testing.assert_allclose(back.zhat, ds.zhat, atol=1e-12, rtol=0)


def test_corrupt_mix_needs_scalar_block():
    ds = apply_measurements(MeasurementModel(5, (MeasurementBlock((0, 1), 2, identity()),)), _z())
    with pytest.raises(DimError):
        corrupt_mix(ds, 0, {2: 1.0})


def test_model_abc_parents():
    a, b, c = (make_model_abc(v) for v in "ABC")
    np.testing.assert_array_equal(adjacency(a)[:, 0], [1, 0, 0, 0, 0])
    assert c.effective_parents(0) == (0, 1, 2)
    assert b.effective_parents(0) == (0, 1, 2)
    np.testing.assert_array_equal(adjacency(c), adjacency(a))


def test_model_b_without_mixing_is_a():
    z = _z()
    a = realize(make_model_abc("A", seed=2), z)
    b = realize(make_model_abc("B", seed=2, b_mixing=0.0, b_noise=0.0), z)
    np.testing.assert_array_equal(a.zhat, b.zhat)


def test_model_json_round_trip():
    m = make_model_abc("C", seed=3)
    again = MeasurementModel.from_dict(m.to_dict())
    z = _z()
    np.testing.assert_array_equal(realize(m, z).zhat, realize(again, z).zhat)


def test_composed_function():
    f = MeasurementFn("composed", parts=(linear_mix([[1, 1]]), monotone_diffeo(2.0, 0.5, 1.0)))
    block = MeasurementBlock((0, 1), 1, f)
    x = np.array([[0.5, -0.5], [1.0, 1.0]])
    np.testing.assert_allclose(block.fn(x)[:, 0], [0.0, 4 + 0.5 * np.tanh(2.0)])


@pytest.mark.parametrize("bad", [
    {"blocks": []},
    {"n_latents": 2, "blocks": [{"parents": [0], "dim": 1}]},
    {"n_latents": 2, "blocks": [{"parents": [3], "dim": 1, "fn": {"kind": "identity"}}]},
    {"n_latents": 2, "blocks": [{"parents": [0], "dim": 1, "fn": {"kind": "warp"}}]},
])
def test_model_from_dict_errors(bad):
    with pytest.raises(ConfigError):
        MeasurementModel.from_dict(bad)


def test_paired_dataset_offsets_validated():
    with pytest.raises(DataError):
        PairedDataset(np.zeros((3, 2)), np.zeros((3, 2)), (0, 1))


def test_transformer_matches_realize():
    z = _z()
    m = make_model_abc("C", seed=1)
    est = MeasurementTransformer(m, seed=5).fit(z)
    np.testing.assert_array_equal(est.transform(z), realize(m, z, 5).zhat)
    assert est.get_params()["seed"] == 5
