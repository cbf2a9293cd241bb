import json

import numpy as np
import pytest

from tmex.exceptions import ConfigError, IntegrityError
from tmex.scenarios import (SCENARIOS, ScenarioConfig, ScenarioReport, aggregate, istant_data, load_report,
                            nonlinear_simulation, run_scenario)

QUICK = {
    "linear-sim": dict(n_samples=600),
    "nonlinear-sim": dict(n_samples=300),
    "noisy": dict(n_samples=300),
    "weak": dict(n_samples=300),
    "scaling": dict(n_samples=300, params={"n_latents": 6, "n_dags": 2, "edge_prob": 0.3}),
    "shd-pitfall": dict(n_samples=400),
    "istant-synthetic": dict(n_samples=400),
}


@pytest.mark.parametrize("name", SCENARIOS)
def test_every_scenario_runs(name):
    rep = run_scenario(ScenarioConfig(name, n_repeats=3, seed=1, **QUICK[name]))
    assert rep.summary["n_errors"] == 0
    assert len({r["repeat"] for r in rep.records}) == 3
    assert rep.config["n_repeats"] == 3 and rep.config["test"] is not None
    ScenarioReport.from_dict(json.loads(json.dumps(rep.to_dict())))


@pytest.mark.parametrize("name", ["linear-sim", "istant-synthetic"])
def test_deterministic_across_threads(name):
    a = run_scenario(ScenarioConfig(name, n_repeats=4, seed=7, threads=1, **QUICK[name]))
    b = run_scenario(ScenarioConfig(name, n_repeats=4, seed=7, threads=3, **QUICK[name]))
    strip = lambda r: {k: v for k, v in r.to_dict(timing=False).items() if k != "config"}
    assert json.dumps(strip(a), sort_keys=True) == json.dumps(strip(b), sort_keys=True)


def test_aggregates_match_records():
    rep = run_scenario(ScenarioConfig("noisy", n_repeats=5, **QUICK["noisy"]))
    for g, metrics in rep.aggregates.items():
        vals = [r["tmex"] for r in rep.records if r["group"] == g]
        assert metrics["tmex"]["mean"] == pytest.approx(np.mean(vals), abs=1e-10)
        assert metrics["tmex"]["sd"] == pytest.approx(np.std(vals, ddof=1), abs=1e-10)


def test_resolved_config_materializes_defaults():
    cfg = ScenarioConfig("linear-sim").resolved()
    assert cfg.n_samples == 4096 and cfg.n_repeats == 50 and cfg.test.test == "pcm"
    assert cfg.params["latents"] == [0, 1, 2]
    assert ScenarioConfig("scaling", alpha=0.01).resolved().test.alpha == 0.01


@pytest.mark.parametrize("bad", [
    {"scenario": "warp"},
    {"scenario": "noisy", "n_repeats": 0},
    {"scenario": "noisy", "params": {"bogus": 1}},
    {"scenario": "noisy", "colour": "red"},
    {"n_repeats": 3},
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(bad)


def test_config_round_trip():
    cfg = ScenarioConfig("weak", n_repeats=2, seed=5, holm=True).resolved()
    assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg


def test_tampered_report_fails_integrity(tmp_path):
    rep = run_scenario(ScenarioConfig("noisy", n_repeats=3, output_dir=str(tmp_path), **QUICK["noisy"]))
    path = tmp_path / "report.json"
    assert load_report(path).aggregates == rep.aggregates
    d = json.loads(path.read_text())
    d["records"][0]["tmex"] += 1
    path.write_text(json.dumps(d))
    with pytest.raises(IntegrityError):
        load_report(path)
    assert (tmp_path / "records.csv").read_text().startswith("repeat,seed,group")


def test_failed_repeats_are_recorded():
    rep = run_scenario(ScenarioConfig("linear-sim", n_repeats=2, n_samples=30))
    assert rep.summary["n_errors"] == 2
    assert all(r["status"] == "error" and r["error"] for r in rep.records)
    assert rep.aggregates == {}


def test_aggregate_skips_meta_and_flags():
    recs = [{"group": "g", "status": "ok", "repeat": 0, "seed": 1, "x": 1.0, "flag": True},
            {"group": "g", "status": "ok", "repeat": 1, "seed": 2, "x": 3.0, "flag": False}]
    assert aggregate(recs) == {"g": {"x": {"mean": 2.0, "sd": pytest.approx(np.sqrt(2)), "n": 2}}}


def test_nonlinear_simulation_effect():
    z = nonlinear_simulation(20_000, 0, effect=1.0)
    z0 = nonlinear_simulation(20_000, 0, effect=0.0)
    assert z.shape == (20_000, 5)
    assert np.allclose((z[:, 4] - z0[:, 4]), z[:, 3])


def test_istant_data_structure():
    t, y, yhat = istant_data(5000, 0, leak=0.0)[:3]
    assert set(np.unique(t)) <= {0.0, 1.0} and np.array_equal(y, yhat)
    t, y, yhat = istant_data(5000, 0, leak=0.3)[:3]
    assert np.all(yhat[t == 0] == y[t == 0]) and np.any(yhat[t == 1] != y[t == 1])
