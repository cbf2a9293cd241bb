"""Monte-Carlo calibration suite with a pass/fail ledger.

Each check draws its own seeds from ``derive_seed(seed, check_name, k)``
and compares an observed rate or count with a required range. Tolerances
come from binomial standard errors at the stated replication counts.
"""

import time
from dataclasses import asdict, dataclass

import numpy as np

from . import citest, metrics
from ._utils import derive_seed, rng_for
from .scenarios import ScenarioConfig, run_scenario
from .score import tmex_score


@dataclass(frozen=True)
class OracleCase:
    """One calibration check and the invariant it exercises."""

    name: str
    description: str
    invariant: str
    relation: str
    tolerance: str

    def to_dict(self):
        return asdict(self)


def _binomial_halfwidth(p, n, z=2.0):
    return z * np.sqrt(p * (1.0 - p) / n)


def _linear_null(n, seed):
    rng = rng_for(seed, "data")
    z = rng.standard_normal(n)
    return z + rng.standard_normal(n), z + rng.standard_normal(n), z


def _rejection_rate(kind, alternative, n, reps, seed, alpha=0.05):
    """Rejection rate of a test over ``reps`` seeds on the linear-Gaussian design.

    Under the alternative ``y`` additionally gets ``0.5 * x``.
    """
    rejections, pvals = 0, []
    for k in range(reps):
        s = derive_seed(seed, kind, alternative, k)
        x, y, z = _linear_null(n, s)
        if alternative:
            y = y + 0.5 * x
        cfg = citest.CiTestConfig(test=kind, alpha=alpha, seed=s)
        out = citest.pcm_test(y, x, z, cfg) if kind == "pcm" else citest.gcm_test(x, y, z, cfg)
        rejections += out.reject
        pvals.append(out.p_value)
    return rejections / reps, np.array(pvals)


def _check_validity(kind, reps, seed):
    rate, _ = _rejection_rate(kind, False, 2000 if kind == "gcm" else 4096, reps, seed)
    lo, hi = 0.03, 0.07
    return {"observed": rate, "required": [lo, hi], "passed": lo <= rate <= hi}


def _check_power(kind, reps, seed):
    rate, _ = _rejection_rate(kind, True, 4096, reps, seed)
    return {"observed": rate, "required": [0.95, 1.0], "passed": rate >= 0.95}


def _check_ks(reps, seed):
    _, p = _rejection_rate("pcm", False, 1000, reps, seed)
    ks = metrics.ks_uniform(p)
    return {"observed": ks, "required": [0.01, 1.0], "passed": ks > 0.01}


def _check_triangle(reps, seed):
    rng = rng_for(seed, "triangle")
    violations = 0
    for _ in range(reps):
        shape = tuple(rng.integers(1, 6, size=2))
        a, b, c = (rng.integers(0, 2, size=shape) for _ in range(3))
        violations += tmex_score(a, c) > tmex_score(a, b) + tmex_score(b, c)
    return {"observed": violations, "required": [0, 0], "passed": violations == 0}


def _check_bound(reps, seed):
    report = run_scenario(ScenarioConfig("linear-sim", n_repeats=reps, seed=seed))
    a = report.aggregates["A"]["tmex"]
    bound = report.summary["bounds"]["A"]["bound"]
    limit = bound + 2.0 * a["sd"] / np.sqrt(a["n"])
    return {"observed": a["mean"], "required": [0.0, limit], "passed": a["mean"] <= limit}


CHECKS = {
    "gcm_validity": (OracleCase("gcm_validity", "GCM type-I error, linear-Gaussian null, n=2000",
                                "citest: valid level", "rate in range",
                                "[0.03, 0.07] ~ 0.05 +/- 2 binomial SE at 1000 seeds"),
                     lambda r, s: _check_validity("gcm", r, s), 1000),
    "pcm_validity": (OracleCase("pcm_validity", "PCM type-I error, linear-Gaussian null, n=4096",
                                "citest: valid level", "rate in range",
                                "[0.03, 0.07] ~ 0.05 +/- 2 binomial SE at 1000 seeds"),
                     lambda r, s: _check_validity("pcm", r, s), 1000),
    "gcm_power": (OracleCase("gcm_power", "GCM power, y = z + 0.5 x + noise, n=4096",
                             "citest: power on linear alternatives", "rate >= 0.95",
                             "one-sided; expected power is essentially 1"),
                  lambda r, s: _check_power("gcm", r, s), 200),
    "pcm_power": (OracleCase("pcm_power", "PCM power, y = z + 0.5 x + noise, n=4096",
                             "citest: power on linear alternatives", "rate >= 0.95",
                             "one-sided; expected power is essentially 1"),
                  lambda r, s: _check_power("pcm", r, s), 200),
    "pcm_ks_uniformity": (OracleCase("pcm_ks_uniformity", "KS uniformity of PCM null p-values",
                                     "score: null p-values uniform", "KS p > 0.01",
                                     "level 0.01"),
                          _check_ks, 500),
    "hamming_triangle": (OracleCase("hamming_triangle", "triangle inequality of the T-MEX score",
                                    "score: Hamming metric", "zero violations", "exact"),
                         _check_triangle, 1000),
    "expected_bound": (OracleCase("expected_bound", "mean T-MEX of Model A vs the expected bound",
                                  "score: expected-score bound", "mean <= bound + 2 SE",
                                  "2 standard errors of the mean"),
                       _check_bound, 50),
}


def run_calibration(suite=None, budget=None, seed=0, scale=1.0):
    """Run calibration checks and return a JSON-serializable ledger.

    Parameters
    ----------
    suite : iterable of str, optional
        Check names (see ``CHECKS``); all by default.
    budget : float, optional
        Wall-clock budget in seconds. Checks that would start after the
        budget is spent are marked ``skipped``, not failed. ``None``
        disables time-based skipping so the ledger is deterministic.
    seed : int, default=0
    scale : float, default=1.0
        Multiplier on every check's replication count (for quick runs).

    Returns
    -------
    dict with ``checks`` (one entry per check) and ``passed`` (no hard failure).
    """
    names = list(CHECKS) if suite is None else list(suite)
    unknown = set(names) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown calibration checks: {sorted(unknown)}")
    start = time.perf_counter()
    entries = []
    for name in names:
        case, fn, reps = CHECKS[name]
        reps = max(10, int(round(reps * scale)))
        entry = {**case.to_dict(), "replications": reps}
        if budget is not None and time.perf_counter() - start > budget:
            entry.update(status="skipped")
        else:
            result = fn(reps, derive_seed(seed, name))
            entry.update(result, status="passed" if result["passed"] else "failed")
            entry.pop("passed")
        entries.append(entry)
    return {"checks": entries, "passed": all(e["status"] != "failed" for e in entries),
            "seed": seed, "budget": budget}
