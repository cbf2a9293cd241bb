"""Baseline representation metrics and small statistical utilities.

R², MCC and SHD are included because they are what T-MEX is compared
against; each of them can look perfect on an entangled representation
(see the ``weak`` and ``shd-pitfall`` scenarios).
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import kolmogorov
from scipy.stats import norm, rankdata

from . import regress
from ._utils import as_matrix, as_vector
from .exceptions import DegenerateError, ShapeError


def r2_score(z_i, zhat, regressor=None, folds=5, seed=0):
    """Cross-fitted R² of predicting ``z_i`` from ``zhat``.

    Computed as ``1 - MSE / Var(z_i)`` with out-of-fold predictions, so it
    can be negative for a useless or over-fitted predictor.
    """
    z_i = as_vector(z_i, name="z_i")
    zhat = as_matrix(zhat, n_rows=z_i.shape[0], name="zhat")
    if z_i.shape[0] < 4 * folds:
        raise ValueError(f"need at least {4 * folds} rows for {folds} folds")
    var = z_i.var()
    if var <= 1e-12:
        raise DegenerateError("target has zero variance")
    pred = regress.cross_fit(regressor or regress.RegressorSpec(), zhat, z_i, folds=folds, seed=seed)
    return float(1.0 - np.mean((z_i - pred) ** 2) / var)


def _check_pair(a, b):
    a = as_vector(a, name="a")
    b = as_vector(b, n=a.shape[0], name="b")
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise DegenerateError("correlation of a constant vector is undefined")
    return a, b


def pearson(a, b):
    a, b = _check_pair(a, b)
    ac, bc = a - a.mean(), b - b.mean()
    r = float(ac @ bc / np.sqrt((ac @ ac) * (bc @ bc)))
    return max(-1.0, min(1.0, r))


def spearman(a, b):
    """Pearson correlation of average ranks."""
    a, b = _check_pair(a, b)
    return pearson(rankdata(a), rankdata(b))


def correlation_matrix(z, zhat, mode="pearson"):
    """``C[i, k] = corr(z_i, zhat_k)``."""
    z = as_matrix(z, name="z")
    zhat = as_matrix(zhat, n_rows=z.shape[0], name="zhat")
    if mode == "spearman":
        z = np.apply_along_axis(rankdata, 0, z)
        zhat = np.apply_along_axis(rankdata, 0, zhat)
    elif mode != "pearson":
        raise ValueError(f"unknown correlation mode {mode!r}")
    zc, hc = z - z.mean(axis=0), zhat - zhat.mean(axis=0)
    sz, sh = np.linalg.norm(zc, axis=0), np.linalg.norm(hc, axis=0)
    if np.any(sz == 0) or np.any(sh == 0):
        raise DegenerateError("constant column in correlation matrix")
    return np.clip((zc.T @ hc) / np.outer(sz, sh), -1.0, 1.0)


@dataclass(frozen=True)
class MccResult:
    score: float
    permutation: tuple
    correlation_matrix: np.ndarray

    def to_dict(self):
        return {"score": self.score, "permutation": list(self.permutation),
                "correlation_matrix": self.correlation_matrix.tolist()}


def mcc(z, zhat, mode="pearson"):
    """Mean absolute correlation under the best one-to-one matching of columns.

    The matching maximizes the summed ``|corr|`` exactly (Hungarian
    algorithm); ``permutation[i]`` is the ``zhat`` column matched to ``z_i``.
    """
    z = as_matrix(z, name="z")
    zhat = as_matrix(zhat, n_rows=z.shape[0], name="zhat")
    if z.shape[1] != zhat.shape[1]:
        raise ShapeError(f"z has {z.shape[1]} columns, zhat has {zhat.shape[1]}")
    C = correlation_matrix(z, zhat, mode)
    rows, cols = linear_sum_assignment(-np.abs(C))
    perm = tuple(int(c) for c in cols[np.argsort(rows)])
    score = float(np.mean(np.abs(C[np.arange(len(perm)), perm])))
    return MccResult(score, perm, C)


def shd(g1, g2):
    """Structural Hamming distance over unordered node pairs.

    A pair counts once if its edge status differs in any way: a missing,
    extra or reversed edge each cost 1.
    """
    if g1.n_nodes != g2.n_nodes:
        raise ShapeError(f"graphs have {g1.n_nodes} and {g2.n_nodes} nodes")
    a1, a2 = g1.adjacency(), g2.adjacency()
    iu = np.triu_indices(g1.n_nodes, k=1)
    differ = (a1[iu] != a2[iu]) | (a1.T[iu] != a2.T[iu])
    return int(differ.sum())


def mann_whitney_u(a, b, alternative="two_sided"):
    """Mann-Whitney U p-value from the tie-corrected normal approximation.

    ``alternative="greater"`` tests whether values in ``a`` tend to be
    larger than values in ``b``. A continuity correction of 0.5 is applied.
    Calibrated for at least about 8 observations per group.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n1, n2 = a.size, b.size
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([a, b])
    ranks = rankdata(pooled)
    u = ranks[:n1].sum() - n1 * (n1 + 1) / 2.0
    mu = n1 * n2 / 2.0
    n = n1 + n2
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = np.sum(tie_counts**3 - tie_counts) / (n * (n - 1)) if n > 1 else 0.0
    sigma = np.sqrt(n1 * n2 / 12.0 * ((n + 1) - tie_term))
    if sigma == 0:
        return 1.0
    if alternative == "greater":
        return float(norm.sf((u - mu - 0.5) / sigma))
    if alternative == "less":
        return float(norm.cdf((u - mu + 0.5) / sigma))
    if alternative in ("two_sided", "two-sided"):
        z = (abs(u - mu) - 0.5) / sigma
        return float(min(1.0, 2.0 * norm.sf(z)))
    raise ValueError(f"unknown alternative {alternative!r}")


def ks_statistic(p_values):
    p = np.sort(np.asarray(p_values, dtype=float).ravel())
    n = p.size
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - p), np.max(p - (grid - 1.0 / n))))


def ks_uniform(p_values):
    """Asymptotic one-sample Kolmogorov-Smirnov p-value against Uniform(0, 1)."""
    p = np.asarray(p_values, dtype=float).ravel()
    if p.size < 10:
        raise ValueError("need at least 10 values")
    if np.any((p < 0) | (p > 1)):
        raise ValueError("values must lie in [0, 1]")
    d = ks_statistic(p)
    return float(kolmogorov(np.sqrt(p.size) * d))
