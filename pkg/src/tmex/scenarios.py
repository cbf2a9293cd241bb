"""Canned experiments: replicated simulations with aggregate reports.

Every scenario draws ``n_repeats`` independent datasets. Repeat ``r`` uses
the seed ``derive_seed(config.seed, r)`` and everything inside the repeat
(latent noise, encoder parameters, test splits) is derived from it, so a
report does not depend on the number of worker threads.

Scenarios
---------
linear-sim
    Five-variable linear confounding design, encoders A/B/C, T-MEX, R²,
    Spearman correlation and ATE bias of z4 on z5.
nonlinear-sim
    Same graph with nonlinear mechanisms; an exclusive and a mixed encoder.
noisy
    Identity measurements with and without additive Gaussian noise.
weak
    Near-deterministic chain where R² and MCC look perfect but one block
    mixes two latents.
scaling
    Large random location-scale SCM with identity measurements.
shd-pitfall
    Causal discovery on an entangled representation still finds the
    latent graph.
istant-synthetic
    Randomized trial with a label surrogate that may leak the treatment.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import causal, discovery, io, metrics
from ._utils import derive_seed, rng_for
from .citest import CiTestConfig
from .exceptions import ConfigError, IntegrityError, TmexError
from .measurement import (MeasurementBlock, MeasurementModel, PairedDataset, adjacency,
                          exclusive_hypothesis, identity, linear_mix, make_model_abc,
                          monotone_diffeo, realize, _diffeo_params, MODEL_B_MIXING, MODEL_B_NOISE)
from .regress import RegressorSpec
from .scm import (Dag, Mechanism, NoiseSpec, ScmSpec, linear_scm_from_matrix, random_dag,
                  random_scm, sample_scm, simulation_scm)
from .score import oracle_score, tmex_from_data

SCENARIOS = ("linear-sim", "nonlinear-sim", "noisy", "weak", "scaling", "shd-pitfall",
             "istant-synthetic")

# Keys of a record that describe the repeat rather than measure something.
_META = ("repeat", "seed", "group", "status", "error", "wall_clock", "dag")

_DEFAULTS = {
    "linear-sim": dict(n_samples=4096, n_repeats=50, test=CiTestConfig(),
                       params={"latents": [0, 1, 2], "b_mixing": MODEL_B_MIXING,
                               "b_noise": MODEL_B_NOISE, "plm_regressor": RegressorSpec().to_dict()}),
    "nonlinear-sim": dict(n_samples=2000, n_repeats=50,
                          test=CiTestConfig(regressor=RegressorSpec("kernel_ridge", alpha=1e-4)),
                          params={"latents": [0, 1, 2], "mixing": 0.5, "effect": 1.0}),
    "noisy": dict(n_samples=1000, n_repeats=100, test=CiTestConfig(),
                  params={"noise_scale": 0.5}),
    "weak": dict(n_samples=1000, n_repeats=100, test=CiTestConfig(),
                 params={"coef_range": [0.01, 0.1], "noise_range": [0.005, 0.02]}),
    "scaling": dict(n_samples=1000, n_repeats=100, test=CiTestConfig(test="gcm"),
                    params={"n_latents": 50, "n_dags": 20, "edge_prob": 0.05}),
    "shd-pitfall": dict(n_samples=2000, n_repeats=100, test=CiTestConfig(),
                        params={"prune_threshold": 0.05}),
    "istant-synthetic": dict(n_samples=2000, n_repeats=100, test=CiTestConfig(),
                             params={"effect": 0.2, "base_rate": 0.1, "leak_range": [0.02, 0.3],
                                     "leak_probability": 0.5}),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Configuration of one experiment.

    ``None`` fields take scenario-specific defaults in :meth:`resolved`;
    ``params`` holds scenario-specific knobs and is merged over the
    defaults. The top-level ``alpha`` overrides the test's level.
    """

    scenario: str
    n_samples: int = None
    n_repeats: int = None
    alpha: float = 0.05
    test: CiTestConfig = None
    seed: int = 0
    output_dir: str = None
    holm: bool = False
    threads: int = 1
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        if self.n_repeats is not None and self.n_repeats < 1:
            raise ConfigError("n_repeats must be at least 1")
        if self.n_samples is not None and self.n_samples < 1:
            raise ConfigError("n_samples must be positive")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        unknown = set(self.params) - set(_DEFAULTS[self.scenario]["params"])
        if unknown:
            raise ConfigError(f"unknown params for {self.scenario}: {sorted(unknown)}")

    def resolved(self):
        """Copy with every default materialized."""
        d = _DEFAULTS[self.scenario]
        test = self.test or d["test"]
        return replace(
            self,
            n_samples=self.n_samples or d["n_samples"],
            n_repeats=self.n_repeats or d["n_repeats"],
            test=replace(test, alpha=self.alpha),
            params={**d["params"], **self.params},
        )

    def to_dict(self):
        d = asdict(self)
        d["test"] = self.test.to_dict() if self.test is not None else None
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        known = {"scenario", "n_samples", "n_repeats", "alpha", "test", "seed", "output_dir",
                 "holm", "threads", "params"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "scenario" not in d:
            raise ConfigError("config is missing key 'scenario'")
        if d.get("test") is not None:
            d["test"] = CiTestConfig.from_dict(d["test"])
        return cls(**d)


def _summary(values):
    v = np.asarray(values, dtype=float)
    sd = float(v.std(ddof=1)) if v.size > 1 else 0.0
    return {"mean": float(v.mean()), "sd": sd, "n": int(v.size)}


def aggregate(records):
    """Mean, sd (ddof=1) and count of every numeric metric, per group."""
    groups = {}
    for rec in records:
        if rec.get("status") != "ok":
            continue
        g = groups.setdefault(rec["group"], {})
        for k, v in rec.items():
            if k not in _META and isinstance(v, (int, float)) and not isinstance(v, bool):
                g.setdefault(k, []).append(v)
    return {g: {k: _summary(v) for k, v in sorted(m.items())} for g, m in sorted(groups.items())}


def _check_aggregates(stored, recomputed, tol=1e-10):
    if set(stored) != set(recomputed):
        raise IntegrityError("aggregate groups do not match the per-repeat records")
    for g, metrics_ in recomputed.items():
        if set(stored[g]) != set(metrics_):
            raise IntegrityError(f"aggregate metrics for group {g!r} do not match the records")
        for k, s in metrics_.items():
            t = stored[g][k]
            if t["n"] != s["n"] or any(abs(t[q] - s[q]) > tol for q in ("mean", "sd")):
                raise IntegrityError(f"aggregate {g}/{k} disagrees with the per-repeat records")


@dataclass
class ScenarioReport:
    scenario: str
    records: list
    aggregates: dict
    summary: dict
    config: dict
    timing: dict = field(default_factory=dict)

    def to_dict(self, timing=True):
        records = self.records if timing else [
            {k: v for k, v in r.items() if k != "wall_clock"} for r in self.records]
        d = {"scenario": self.scenario, "records": records, "aggregates": self.aggregates,
             "summary": self.summary, "config": self.config}
        if timing:
            d["timing"] = self.timing
        return d

    @classmethod
    def from_dict(cls, d):
        """Load a report and verify that its aggregates match its records."""
        for key in ("scenario", "records", "aggregates"):
            if key not in d:
                raise IntegrityError(f"report is missing key {key!r}")
        _check_aggregates(d["aggregates"], aggregate(d["records"]))
        return cls(d["scenario"], d["records"], d["aggregates"], d.get("summary", {}),
                   d.get("config", {}), d.get("timing", {}))

    def table(self):
        """Rows ``(group, metric, mean, sd, n)`` for text rendering."""
        return [(g, k, s["mean"], s["sd"], s["n"])
                for g, m in self.aggregates.items() for k, s in m.items()]


def _alt_power(rep):
    """Rejections among hypothesized-parent cells (for an empirical power estimate)."""
    mask = rep.V.astype(bool)
    return int(rep.W_hat[mask].sum()), int(mask.sum())


def _tmex_fields(rep, hyp, truth, latents=None):
    hits, cells = _alt_power(rep)
    return {"tmex": rep.score, "oracle_tmex": oracle_score(hyp, truth, latents),
            "alt_rejected": hits, "alt_cells": cells, "grid_cells": int(rep.V.size)}


# ---------------------------------------------------------------- linear-sim

def _linear_sim(cfg, seed):
    p = cfg.params
    n = cfg.n_samples
    latents = list(p["latents"])
    z = sample_scm(simulation_scm(), n, derive_seed(seed, "scm"))
    hyp = exclusive_hypothesis(5, 0)
    plm_reg = RegressorSpec.from_dict(p["plm_regressor"])
    out = []
    for v in "ABC":
        model = make_model_abc(v, seed=derive_seed(seed, "encoder"),
                               b_mixing=p["b_mixing"], b_noise=p["b_noise"])
        ds = realize(model, z, derive_seed(seed, "measurement", v))
        rep = tmex_from_data(ds, hyp, cfg.test.with_seed(derive_seed(seed, "tmex", v)),
                             holm=cfg.holm, latents=latents)
        zh = ds.zhat
        lin = causal.ate_linear_adjust(z[:, 3], z[:, 4], zh)
        plm = causal.ate_partially_linear(z[:, 3], z[:, 4], zh, regressor=plm_reg,
                                          seed=derive_seed(seed, "plm", v))
        rec = {"group": v, **_tmex_fields(rep, hyp, model, latents),
               "bias_linear": causal.ate_bias(lin, 1.0), "bias_plm": causal.ate_bias(plm, 1.0),
               "r2_z1": metrics.r2_score(z[:, 0], zh, seed=derive_seed(seed, "r2", v)),
               "spearman_z1": metrics.spearman(z[:, 0], zh[:, 0])}
        for r, i in enumerate(latents):
            rec[f"p_z{i + 1}"] = float(rep.p_values[r, 0])
        out.append(rec)
    return out


def _linear_summary(cfg, records):
    ok = [r for r in records if r.get("status") == "ok"]
    summary = {}
    for g in "ABC":
        rs = [r for r in ok if r["group"] == g]
        if not rs:
            continue
        summary[g] = {"median_abs_bias_linear": float(np.median([r["bias_linear"] for r in rs])),
                      "median_abs_bias_plm": float(np.median([r["bias_plm"] for r in rs]))}
    rs = [r for r in ok if r["group"] == "A"]
    if len(rs) >= 10:
        null_keys = [f"p_z{i + 1}" for i in cfg.params["latents"][1:]]
        summary["uniformity"] = {k: metrics.ks_uniform([r[k] for r in rs]) for k in null_keys}
        alt = f"p_z{cfg.params['latents'][0] + 1}"
        summary["alternative_rejection_rate"] = float(np.mean([r[alt] < cfg.alpha for r in rs]))
    return summary


# ------------------------------------------------------------- nonlinear-sim

def nonlinear_simulation(n, seed, effect=1.0):
    """Nonlinear version of the five-variable design with a constant z4 -> z5 effect.

    z1 confounds z4 and z5; z2 is a child of z1 and z5, z3 a child of z1
    and z2. Noise is Gaussian.
    """
    e = rng_for(seed, "nonlinear").standard_normal((n, 5))
    z1 = e[:, 0]
    z4 = np.tanh(2.0 * z1) + 0.5 * z1 + 0.5 * e[:, 3]
    z5 = effect * z4 + np.sin(2.0 * z1) + 0.5 * z1**2 + 0.5 * e[:, 4]
    z2 = np.tanh(z1) + 0.5 * z5 + 0.5 * e[:, 1]
    z3 = 0.5 * z1 * z2 / (1.0 + np.abs(z2)) + np.tanh(z2) + 0.5 * e[:, 2]
    return np.column_stack([z1, z2, z3, z4, z5])


def _nonlinear_sim(cfg, seed):
    p = cfg.params
    latents = list(p["latents"])
    z = nonlinear_simulation(cfg.n_samples, derive_seed(seed, "scm"), p["effect"])
    a, b, c = _diffeo_params(derive_seed(seed, "encoder"))
    hyp = exclusive_hypothesis(5, 0)
    out = []
    for group, mix, parents in (("perfect", [[1.0]], (0,)), ("mixed", [[1.0, p["mixing"]]], (0, 1))):
        model = MeasurementModel(5, (MeasurementBlock(parents, 1, monotone_diffeo(a, b, c, mix=mix)),))
        ds = realize(model, z)
        rep = tmex_from_data(ds, hyp, cfg.test.with_seed(derive_seed(seed, "tmex", group)),
                             holm=cfg.holm, latents=latents)
        plm = causal.ate_partially_linear(z[:, 3], z[:, 4], ds.zhat, regressor=cfg.test.regressor,
                                          seed=derive_seed(seed, "plm", group))
        lin = causal.ate_linear_adjust(z[:, 3], z[:, 4], ds.zhat)
        out.append({"group": group, **_tmex_fields(rep, hyp, model, latents),
                    "bias_plm": causal.ate_bias(plm, p["effect"]),
                    "bias_linear": causal.ate_bias(lin, p["effect"])})
    return out


def _nonlinear_summary(cfg, records):
    ok = [r for r in records if r.get("status") == "ok"]
    med = {g: float(np.median([r["bias_plm"] for r in ok if r["group"] == g]))
           for g in ("perfect", "mixed") if any(r["group"] == g for r in ok)}
    summary = {"median_abs_bias_plm": med}
    if len(med) == 2 and med["perfect"] > 0:
        summary["bias_ratio"] = med["mixed"] / med["perfect"]
    return summary


# --------------------------------------------------------------------- noisy

CHAIN3 = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)


def _identity_model(n_latents, noise_scale=0.0):
    fn = identity() if noise_scale == 0 else linear_mix([[1.0]], noise_scale=noise_scale)
    return MeasurementModel(n_latents, tuple(MeasurementBlock((i,), 1, fn) for i in range(n_latents)))


def _noisy(cfg, seed):
    z = sample_scm(linear_scm_from_matrix(CHAIN3), cfg.n_samples, derive_seed(seed, "scm"))
    hyp = _identity_model(3)
    out = []
    for group, scale in (("clean", 0.0), ("noisy", cfg.params["noise_scale"])):
        model = _identity_model(3, scale)
        ds = realize(model, z, derive_seed(seed, "measurement"))
        rep = tmex_from_data(ds, hyp, cfg.test.with_seed(derive_seed(seed, "tmex", group)),
                             holm=cfg.holm)
        out.append({"group": group, **_tmex_fields(rep, hyp, model)})
    return out


# ---------------------------------------------------------------------- weak

def weak_scm(seed, coef_range=(0.01, 0.1), noise_range=(0.005, 0.02)):
    """Three-latent chain with weak edges and tiny noise on the non-root nodes."""
    rng = rng_for(seed, "weak-params")
    dag = Dag(3, [(0, 1), (0, 2), (1, 2)])
    a12, a13, a23 = rng.uniform(*coef_range, size=3)
    b2, b3 = rng.uniform(*noise_range, size=2)
    mechs = (Mechanism("linear", NoiseSpec("gaussian", 1.0), weights=np.zeros(0)),
             Mechanism("linear", NoiseSpec("gaussian", b2), weights=np.array([a12])),
             Mechanism("linear", NoiseSpec("gaussian", b3), weights=np.array([a13, a23])))
    return ScmSpec(dag, mechs)


def weak_model():
    """Block 1 sums z1 and z2; blocks 2 and 3 copy z2 and z3."""
    return MeasurementModel(3, (MeasurementBlock((0, 1), 1, linear_mix([[1.0, 1.0]])),
                                MeasurementBlock((1,), 1, identity()),
                                MeasurementBlock((2,), 1, identity())))


def _weak(cfg, seed):
    p = cfg.params
    z = sample_scm(weak_scm(derive_seed(seed, "scm-params"), p["coef_range"], p["noise_range"]),
                   cfg.n_samples, derive_seed(seed, "scm"))
    model = weak_model()
    hyp = _identity_model(3)
    ds = realize(model, z)
    rep = tmex_from_data(ds, hyp, cfg.test.with_seed(derive_seed(seed, "tmex")), holm=cfg.holm)
    r2 = [metrics.r2_score(z[:, i], ds.zhat, seed=derive_seed(seed, "r2", i)) for i in range(3)]
    return [{"group": "all", **_tmex_fields(rep, hyp, model),
             "mcc": metrics.mcc(z, ds.zhat, "pearson").score,
             "r2_z1": r2[0], "r2_z2": r2[1], "r2_z3": r2[2], "r2_min": min(r2)}]


# ------------------------------------------------------------------- scaling

def scaling_scm(dag_index, cfg):
    p = cfg.params
    dag_seed = derive_seed(cfg.seed, "dag", dag_index)
    dag = random_dag(p["n_latents"], p["edge_prob"], dag_seed)
    return random_scm(dag, kind="location_scale", seed=dag_seed)


def _scaling(cfg, seed, repeat):
    p = cfg.params
    per_dag = max(1, cfg.n_repeats // p["n_dags"])
    d = min(repeat // per_dag, p["n_dags"] - 1)
    z = sample_scm(scaling_scm(d, cfg), cfg.n_samples, derive_seed(seed, "scm"))
    model = _identity_model(p["n_latents"])
    rep = tmex_from_data(realize(model, z), model, cfg.test.with_seed(derive_seed(seed, "tmex")),
                         holm=cfg.holm)
    return [{"group": "all", "dag": d, **_tmex_fields(rep, model, model),
             "n_tested": int(rep.V.size - len(rep.trivial_cells))}]


# --------------------------------------------------------------- shd-pitfall

def _shd_pitfall(cfg, seed):
    dcfg = discovery.DiscoveryConfig(prune_threshold=cfg.params["prune_threshold"])
    res = discovery.shd_pitfall_trial(seed, n=cfg.n_samples, cfg=dcfg)
    draw = discovery.PitfallDraw.sample(derive_seed(seed, "pitfall"))
    return [{"group": "all", "shd": res["shd"], "shd_zero": int(res["shd"] == 0),
             "n_edges_found": res["n_edges_found"], "entangled": res["entangled"],
             "oracle_tmex": oracle_score(_identity_model(3), draw.measurement_model())}]


def _shd_summary(cfg, records):
    ok = [r for r in records if r.get("status") == "ok"]
    shd = [r["shd"] for r in ok]
    hist = {str(k): int(sum(s == k for s in shd)) for k in range(4)}
    return {"shd_histogram": hist, "fraction_shd_zero": float(np.mean([s == 0 for s in shd]))
            if shd else None}


# ---------------------------------------------------------- istant-synthetic

def istant_data(n, seed, effect=0.2, base_rate=0.1, leak=0.0):
    """Binary randomized trial with a label surrogate.

    ``T ~ Bernoulli(0.5)``, ``Y ~ Bernoulli(base_rate + effect * T)`` and
    ``Yhat = Y XOR L`` with ``L ~ Bernoulli(leak * T)``: the surrogate
    flips labels in the treated arm only, so ``leak = 0`` is faithful.
    """
    rng = rng_for(seed, "istant")
    t = (rng.random(n) < 0.5).astype(float)
    y = (rng.random(n) < base_rate + effect * t).astype(float)
    flip = rng.random(n) < leak * t
    return t, y, np.where(flip, 1.0 - y, y)


def _istant(cfg, seed):
    p = cfg.params
    rng = rng_for(seed, "leak")
    leaky = rng.random() < p["leak_probability"]
    lam = float(rng.uniform(*p["leak_range"])) if leaky else 0.0
    t, y, yhat = istant_data(cfg.n_samples, derive_seed(seed, "data"), p["effect"], p["base_rate"], lam)
    hyp = MeasurementModel(2, (MeasurementBlock((1,), 1, identity()),))
    ds = PairedDataset(np.column_stack([t, y]), yhat[:, None], (0, 1))
    rep = tmex_from_data(ds, hyp, cfg.test.with_seed(derive_seed(seed, "tmex")), holm=cfg.holm)
    truth = MeasurementModel(2, (MeasurementBlock((0, 1) if lam > 0 else (1,), 1,
                                                  linear_mix([[1.0, 1.0]] if lam > 0 else [[1.0]])),))
    ate = causal.ate_aipw(t, yhat, propensity=0.5, seed=derive_seed(seed, "aipw"))
    return [{"group": "all", **_tmex_fields(rep, hyp, truth), "leak": lam,
             "abs_bias": causal.ate_bias(ate, p["effect"])}]


def _istant_summary(cfg, records):
    ok = [r for r in records if r.get("status") == "ok"]
    g1 = [r["abs_bias"] for r in ok if r["tmex"] >= 1]
    g0 = [r["abs_bias"] for r in ok if r["tmex"] == 0]
    out = {"n_tmex_1": len(g1), "n_tmex_0": len(g0)}
    if g1 and g0:
        out["mann_whitney_p"] = metrics.mann_whitney_u(g1, g0, alternative="greater")
        out["median_abs_bias_tmex_1"] = float(np.median(g1))
        out["median_abs_bias_tmex_0"] = float(np.median(g0))
    return out


# -------------------------------------------------------------------- runner

_RUNNERS = {
    "linear-sim": (_linear_sim, _linear_summary),
    "nonlinear-sim": (_nonlinear_sim, _nonlinear_summary),
    "noisy": (_noisy, None),
    "weak": (_weak, None),
    "scaling": (_scaling, None),
    "shd-pitfall": (_shd_pitfall, _shd_summary),
    "istant-synthetic": (_istant, _istant_summary),
}


def _run_repeat(cfg, repeat):
    seed = derive_seed(cfg.seed, repeat)
    fn = _RUNNERS[cfg.scenario][0]
    start = time.perf_counter()
    try:
        rows = fn(cfg, seed, repeat) if cfg.scenario == "scaling" else fn(cfg, seed)
        status = {"status": "ok"}
    except (TmexError, ValueError, np.linalg.LinAlgError) as exc:
        rows = [{"group": "all"}]
        status = {"status": "error", "error": f"{type(exc).__name__}: {exc}"}
    elapsed = time.perf_counter() - start
    return [{"repeat": repeat, "seed": seed, **row, **status, "wall_clock": elapsed} for row in rows]


def _bounds(cfg, aggregates):
    """Expected-score bound per group with power estimated from the hypothesized cells."""
    out = {}
    for g, m in aggregates.items():
        if "alt_cells" not in m or m["alt_cells"]["mean"] == 0:
            continue
        beta = m["alt_rejected"]["mean"] / m["alt_cells"]["mean"]
        ones, size = m["alt_cells"]["mean"], m["grid_cells"]["mean"]
        out[g] = {"beta_hat": beta, "bound": cfg.alpha * (size - ones) + (1.0 - beta) * ones}
    return out


def run_scenario(config):
    """Run every repeat of a scenario and assemble its report.

    Repeats that raise a package error are recorded with ``status="error"``
    and do not stop the run.
    """
    cfg = config.resolved()
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            chunks = list(pool.map(lambda r: _run_repeat(cfg, r), range(cfg.n_repeats)))
    else:
        chunks = [_run_repeat(cfg, r) for r in range(cfg.n_repeats)]
    records = [rec for chunk in chunks for rec in chunk]
    aggregates = aggregate(records)
    summary_fn = _RUNNERS[cfg.scenario][1]
    summary = summary_fn(cfg, records) if summary_fn else {}
    summary["bounds"] = _bounds(cfg, aggregates)
    summary["n_errors"] = sum(r["status"] == "error" for r in records)
    times = [c[0]["wall_clock"] for c in chunks]
    timing = {"mean_wall_clock": float(np.mean(times)), "max_wall_clock": float(np.max(times))}
    report = ScenarioReport(cfg.scenario, records, aggregates, summary, cfg.to_dict(), timing)
    if cfg.output_dir:
        write_report(report, cfg.output_dir)
    return report


def write_report(report, output_dir):
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_json(report.to_dict(), out / "report.json")
    keys = []
    for rec in report.records:
        keys += [k for k in rec if k not in keys]
    io.write_rows([keys] + [[rec.get(k, "") for k in keys] for rec in report.records],
                  out / "records.csv")


def load_report(path):
    return ScenarioReport.from_dict(io.read_json(path))
