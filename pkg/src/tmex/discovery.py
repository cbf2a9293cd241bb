"""Small linear non-Gaussian causal discovery.

A DirectLiNGAM-style search: repeatedly pick as the next root the variable
whose regression residuals are closest to independent of it (measured by
distance correlation), then prune the full ordering with standardized OLS
coefficients. Enough to show that a correct graph can be recovered from an
entangled representation.
"""

from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator

from . import metrics
from ._utils import as_matrix, as_vector, derive_seed, rng_for
from .exceptions import ConfigError, DegenerateError, DimError, SmallSampleError
from .measurement import MeasurementBlock, MeasurementModel, linear_mix
from .scm import Dag


@dataclass(frozen=True)
class DiscoveryConfig:
    independence: str = "distance_correlation"
    prune_threshold: float = 0.05
    max_nodes: int = 10
    min_samples: int = 200

    def __post_init__(self):
        if self.independence != "distance_correlation":
            raise ConfigError(f"unknown independence measure {self.independence!r}")
        if not self.prune_threshold > 0:
            raise ConfigError("prune_threshold must be positive")
        if not 1 <= self.max_nodes <= 10:
            raise ConfigError("max_nodes must lie in [1, 10]")

    def to_dict(self):
        return asdict(self)


def _row_means(a):
    """Row means of the matrix ``|a_i - a_j|`` in O(n log n)."""
    n = a.shape[0]
    idx = np.argsort(a, kind="stable")
    s = a[idx]
    k = np.arange(n)
    prefix = np.concatenate([[0.0], np.cumsum(s)])
    sums = s * k - prefix[:-1] + (prefix[-1] - prefix[1:]) - s * (n - k - 1)
    out = np.empty(n)
    out[idx] = sums / n
    return out


def distance_correlation(a, b):
    """Sample distance correlation of two scalar samples, in [0, 1].

    Uses the V-statistic form of the double-centered distance-matrix
    formula; only the cross term needs the full ``n x n`` matrices.
    """
    a = as_vector(a, name="a")
    b = as_vector(b, n=a.shape[0], name="b")
    if a.shape[0] < 10:
        raise SmallSampleError("distance correlation needs at least 10 observations")
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise DegenerateError("distance correlation of a constant vector is undefined")
    ra, rb = _row_means(a), _row_means(b)
    ma, mb = ra.mean(), rb.mean()
    cross = np.mean(np.abs(a[:, None] - a[None, :]) * np.abs(b[:, None] - b[None, :]))
    dcov2 = cross + ma * mb - 2.0 * np.mean(ra * rb)
    # mean over pairs of (a_i - a_j)^2 is twice the population variance
    dvar_a = 2.0 * a.var() + ma**2 - 2.0 * np.mean(ra**2)
    dvar_b = 2.0 * b.var() + mb**2 - 2.0 * np.mean(rb**2)
    denom = np.sqrt(dvar_a * dvar_b)
    if denom <= 0:
        return 0.0
    return float(min(1.0, np.sqrt(max(dcov2, 0.0) / denom)))


def _residualize(target, root):
    rc = root - root.mean()
    coef = (rc @ (target - target.mean())) / (rc @ rc)
    return target - target.mean() - coef * rc


def causal_order(data, cfg=None):
    """Causal ordering of the columns of ``data``, roots first.

    Ties in the root score are broken by the lowest column index.
    """
    cfg = cfg or DiscoveryConfig()
    X = as_matrix(data, name="data").copy()
    n, d = X.shape
    if d > cfg.max_nodes:
        raise DimError(f"{d} variables exceed max_nodes={cfg.max_nodes}")
    if n < cfg.min_samples:
        raise SmallSampleError(f"causal_order needs n >= {cfg.min_samples}, got {n}")
    remaining = list(range(d))
    order = []
    while len(remaining) > 1:
        scores = []
        for c in remaining:
            s = 0.0
            for o in remaining:
                if o != c:
                    s += distance_correlation(X[:, c], _residualize(X[:, o], X[:, c]))
            scores.append(s)
        root = remaining[int(np.argmin(scores))]
        order.append(root)
        remaining.remove(root)
        for o in remaining:
            X[:, o] = _residualize(X[:, o], X[:, root])
    return order + remaining


def prune_edges(order, data, cfg=None):
    """Keep edges from earlier to later nodes whose standardized OLS coefficient exceeds the threshold."""
    cfg = cfg or DiscoveryConfig()
    X = as_matrix(data, name="data")
    d = X.shape[1]
    if sorted(order) != list(range(d)):
        raise ValueError("order must be a permutation of the columns")
    sd = X.std(axis=0)
    if np.any(sd == 0):
        raise DegenerateError("constant column")
    Xs = (X - X.mean(axis=0)) / sd
    edges = []
    for k in range(1, d):
        preds = list(order[:k])
        coef, *_ = np.linalg.lstsq(Xs[:, preds], Xs[:, order[k]], rcond=None)
        edges += [(p, order[k]) for p, c in zip(preds, coef) if abs(c) > cfg.prune_threshold]
    return Dag(d, sorted(edges))


class DirectLingam(BaseEstimator):
    """Estimator wrapper around :func:`causal_order` and :func:`prune_edges`.

    Attributes
    ----------
    causal_order_ : list of int
    dag_ : Dag
    adjacency_matrix_ : ndarray of shape (d, d)
        ``adjacency_matrix_[u, v] = 1`` for an edge ``u -> v``.
    """

    def __init__(self, prune_threshold=0.05, max_nodes=10):
        self.prune_threshold = prune_threshold
        self.max_nodes = max_nodes

    def fit(self, X, y=None):
        cfg = DiscoveryConfig(prune_threshold=self.prune_threshold, max_nodes=self.max_nodes)
        self.causal_order_ = causal_order(X, cfg)
        self.dag_ = prune_edges(self.causal_order_, X, cfg)
        self.adjacency_matrix_ = self.dag_.adjacency()
        return self


TRUE_DAG = Dag(3, [(0, 1), (0, 2), (1, 2)])


@dataclass(frozen=True)
class PitfallDraw:
    """Coefficients of one three-variable chain and its entangled measurement."""

    alpha12: float
    alpha13: float
    alpha23: float
    beta2: float
    beta3: float
    gamma1: float
    gamma21: float
    gamma2: float
    gamma3: float

    @classmethod
    def sample(cls, seed):
        rng = rng_for(seed, "pitfall-params")
        a12, a13, a23, g1, g21, g2, g3 = rng.uniform(1.0, 10.0, size=7)
        b2, b3 = rng.uniform(0.005, 0.02, size=2)
        return cls(a12, a13, a23, b2, b3, g1, g21, g2, g3)

    def measurement_model(self):
        """Measurement model of the draw; block 1 has two latent parents."""
        blocks = (MeasurementBlock((0, 1), 1, linear_mix([[self.gamma1, self.gamma21]])),
                  MeasurementBlock((1,), 1, linear_mix([[self.gamma2]])),
                  MeasurementBlock((2,), 1, linear_mix([[self.gamma3]])))
        return MeasurementModel(3, blocks)


def _uniform_noise(rng, n):
    # Unit-variance uniform noise; non-Gaussian so the ordering is identifiable.
    return rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size=n)


def pitfall_data(seed, n=2000):
    """Latents ``z`` and measurements ``zhat`` for one pitfall trial."""
    p = PitfallDraw.sample(seed)
    rng = rng_for(seed, "pitfall-noise")
    e1, e2, e3 = (_uniform_noise(rng, n) for _ in range(3))
    z1 = e1
    z2 = p.alpha12 * z1 + p.beta2 * e2
    z3 = p.alpha13 * z1 + p.alpha23 * z2 + p.beta3 * e3
    z = np.column_stack([z1, z2, z3])
    zhat = np.column_stack([p.gamma1 * z1 + p.gamma21 * z2, p.gamma2 * z2, p.gamma3 * z3])
    return p, z, zhat


def shd_pitfall_trial(seed, n=2000, cfg=None):
    """Run discovery on entangled measurements and compare with the latent DAG.

    Returns
    -------
    dict with keys ``seed``, ``shd``, ``entangled`` and ``n_edges_found``.
    """
    p, _, zhat = pitfall_data(derive_seed(seed, "pitfall"), n)
    cfg = cfg or DiscoveryConfig()
    dag = prune_edges(causal_order(zhat, cfg), zhat, cfg)
    entangled = len(p.measurement_model().effective_parents(0)) > 1
    return {"seed": int(seed), "shd": metrics.shd(dag, TRUE_DAG), "entangled": bool(entangled),
            "n_edges_found": len(dag.edges)}
