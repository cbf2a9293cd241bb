"""Regression-based conditional independence tests and Holm correction.

Two tests of ``H0: X _||_ Y | Z`` are provided:

* :func:`gcm_test` -- the generalized covariance measure. It checks that
  the product of the two conditional-mean residuals has mean zero.
* :func:`pcm_test` -- the projected covariance measure in its single-split
  form. It checks ``E[Y | X, Z] = E[Y | Z]`` along a direction learned on
  one half of the data and evaluated on the other half.

Both tests are only as valid as the regressions behind them: the
conditional means must be learned well enough.
"""

from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.stats import norm

from . import regress
from ._utils import as_matrix, as_vector, derive_seed
from .exceptions import ConfigError, DegenerateError, SmallSampleError

SD_FLOOR = 1e-12


@dataclass(frozen=True)
class CiTestConfig:
    test: str = "pcm"
    regressor: regress.RegressorSpec = field(default_factory=regress.RegressorSpec)
    alpha: float = 0.05
    seed: int = 0
    pcm_split_fraction: float = 0.5
    folds: int = 2
    pcm_residualize: bool = True

    def __post_init__(self):
        if self.test not in ("gcm", "pcm"):
            raise ConfigError(f"unknown test {self.test!r}; expected 'gcm' or 'pcm'")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        if not 0.1 < self.pcm_split_fraction < 0.9:
            raise ConfigError("pcm_split_fraction must lie in (0.1, 0.9)")
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if int(self.seed) < 0:
            raise ConfigError("seed must be nonnegative")

    def with_seed(self, seed):
        return replace(self, seed=seed)

    def to_dict(self):
        d = asdict(self)
        d["regressor"] = self.regressor.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        unknown = set(d) - {"test", "regressor", "alpha", "seed", "pcm_split_fraction", "folds",
                            "pcm_residualize"}
        if unknown:
            raise ConfigError(f"unknown test config keys: {sorted(unknown)}")
        if "regressor" in d:
            d["regressor"] = regress.RegressorSpec.from_dict(d["regressor"])
        return cls(**d)


@dataclass(frozen=True)
class TestOutcome:
    statistic: float
    p_value: float
    reject: bool
    n_used: int

    def to_dict(self):
        return {"statistic": self.statistic, "p_value": self.p_value, "reject": self.reject}


TestOutcome.__test__ = False  # not a pytest class


def _residuals(target, z, cfg, key):
    """Cross-fitted residual of ``target`` on ``z``; centered raw values if ``z`` is empty."""
    if z.shape[1] == 0:
        return target - target.mean()
    pred = regress.cross_fit(cfg.regressor, z, target, folds=cfg.folds,
                             seed=derive_seed(cfg.seed, key))
    return target - pred


def _conditioning(z, n):
    if z is None or np.size(z) == 0:
        return np.zeros((n, 0))
    return as_matrix(z, n_rows=n, name="z")


def _normalized_mean(r):
    sd = r.std(ddof=1)
    if sd < SD_FLOOR:
        raise DegenerateError(f"residual products have standard deviation {sd:.3g}")
    return np.sqrt(r.shape[0]) * r.mean() / sd


def gcm_test(x, y, z, cfg):
    """Generalized covariance measure test of ``x _||_ y | z``.

    Parameters
    ----------
    x : array of shape (n,)
    y : array of shape (n,) or (n, d_y)
        Multivariate ``y`` is tested coordinate-wise and the p-values are
        combined with a Bonferroni factor ``d_y``.
    z : array of shape (n, d_z), d_z may be 0
    cfg : CiTestConfig

    Returns
    -------
    TestOutcome
        ``statistic`` is the largest absolute coordinate statistic.
    """
    x = as_vector(x, name="x")
    n = x.shape[0]
    y = as_matrix(y, n_rows=n, name="y")
    z = _conditioning(z, n)
    if n < 20:
        raise SmallSampleError(f"GCM needs at least 20 rows, got {n}")
    rx = _residuals(x, z, cfg, "gcm-x")
    stats = []
    for c in range(y.shape[1]):
        ry = _residuals(y[:, c], z, cfg, f"gcm-y{c}")
        stats.append(_normalized_mean(rx * ry))
    stats = np.abs(np.array(stats))
    p_coord = 2.0 * norm.sf(stats)
    p = min(1.0, y.shape[1] * float(p_coord.min()))
    return TestOutcome(float(stats.max()), p, p < cfg.alpha, n)


def split_indices(n, fraction, seed):
    """Seed-derived split into a direction-learning half and an evaluation half."""
    perm = np.random.default_rng(derive_seed(seed, "split")).permutation(n)
    cut = int(round(fraction * n))
    return perm[:cut], perm[cut:]


def pcm_test(y, x, z, cfg):
    """Single-split projected covariance measure test of ``E[y | x, z] = E[y | z]``.

    On the first part of the data a regression of ``y`` on ``(x, z)`` is
    fitted and its ``z``-explainable part is removed, giving a direction
    ``h(x, z)``. On the second part ``y`` is regressed on ``z`` and the
    normalized mean of ``residual * h`` is referred to the upper tail of a
    standard normal.

    Parameters
    ----------
    y : array of shape (n,)
        Univariate response.
    x : array of shape (n, d_x)
    z : array of shape (n, d_z), d_z may be 0
    cfg : CiTestConfig
    """
    y = as_vector(y, name="y")
    n = y.shape[0]
    x = as_matrix(x, n_rows=n, name="x")
    z = _conditioning(z, n)
    if n < 40:
        raise SmallSampleError(f"PCM needs at least 40 rows, got {n}")
    d1, d2 = split_indices(n, cfg.pcm_split_fraction, cfg.seed)
    if len(d1) < 20 or len(d2) < 20:
        raise SmallSampleError("each PCM half needs at least 20 rows")

    xz = np.hstack([x, z])
    g_hat = regress.fit(cfg.regressor, xz[d1], y[d1])
    m_tilde = regress.fit(cfg.regressor, z[d1], g_hat.predict(xz[d1]))

    m_hat = regress.fit(cfg.regressor, z[d2], y[d2])
    eps = y[d2] - m_hat.predict(z[d2])
    direction = g_hat.predict(xz[d2]) - m_tilde.predict(z[d2])
    if cfg.pcm_residualize and z.shape[1] > 0:
        # Remove what z alone explains of the direction on the second half.
        # Under the null the direction is then orthogonal to z-only fitting
        # bias as well, not just to the noise.
        direction = direction - regress.fit(cfg.regressor, z[d2], direction).predict(z[d2])
    stat = float(_normalized_mean(eps * direction))
    p = float(norm.sf(stat))
    return TestOutcome(stat, p, p < cfg.alpha, len(d2))


def holm_adjust(p_values):
    """Holm step-down adjusted p-values, returned in the input order."""
    p = np.asarray(p_values, dtype=float).ravel()
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    m = p.shape[0]
    order = np.argsort(p, kind="stable")
    scaled = np.minimum(1.0, (m - np.arange(m)) * p[order])
    adjusted = np.empty(m)
    adjusted[order] = np.maximum.accumulate(scaled)
    return adjusted


def run_test(cfg, latent, block, conditioning):
    """Dispatch one cell of the exclusivity grid to the configured test.

    PCM uses the latent as the response and the block as predictor; GCM
    uses the latent as ``x`` and the block as ``y``.
    """
    if cfg.test == "pcm":
        return pcm_test(latent, block, conditioning, cfg)
    return gcm_test(latent, block, conditioning, cfg)
