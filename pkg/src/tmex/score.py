"""Test-based measurement exclusivity (T-MEX) scoring.

For every latent ``i`` in the hypothesis grid and every block ``j`` the null
``zhat_j _||_ z_i | z_{-i}`` is tested. Rejections form ``W_hat`` and the
score is the Hamming distance between ``W_hat`` and the hypothesized
adjacency ``V``.

Cells whose block is an exact linear function of the conditioning set
(e.g. an identity copy of another latent) satisfy the null trivially; they
are given p-value 1 without running a test and listed in
``TmexReport.trivial_cells``.
"""

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from . import citest
from .regress import RegressorSpec
from ._utils import as_matrix, derive_seed
from .exceptions import CellTestError, ConfigError, DataError, ShapeError, TmexError
from .measurement import PairedDataset, adjacency, offsets_from_dims

DETERMINED_RTOL = 1e-8


def _linearly_determined(block, cond):
    """True if every column of ``block`` is an exact affine function of ``cond``."""
    if cond.shape[1] and all(np.any(np.all(cond == col[:, None], axis=0)) for col in block.T):
        return True  # verbatim copies, the common case for identity measurements
    design = np.hstack([np.ones((block.shape[0], 1)), cond])
    coef, *_ = np.linalg.lstsq(design, block, rcond=None)
    resid = block - design @ coef
    scale = np.maximum(block.std(axis=0), 1e-300)
    return bool(np.all(resid.std(axis=0) <= DETERMINED_RTOL * scale))


def _run_cell(ds, i, j, cfg):
    zi = ds.z[:, i]
    cond = np.delete(ds.z, i, axis=1)
    blk = ds.block(j)
    if _linearly_determined(blk, cond):
        return 1.0, True
    try:
        outcome = citest.run_test(cfg.with_seed(derive_seed(cfg.seed, i, j)), zi, blk, cond)
    except TmexError as exc:
        raise CellTestError(i, j, exc) from exc
    return outcome.p_value, False


def estimate_w_hat(ds, cfg, holm=False, latents=None, threads=1):
    """Run the exclusivity tests and threshold them.

    Parameters
    ----------
    ds : PairedDataset
    cfg : CiTestConfig
    holm : bool, default=False
        Holm-adjust all grid p-values before thresholding at ``cfg.alpha``.
    latents : sequence of int, optional
        Latents entering the hypothesis grid (rows of the result). All
        latents still enter the conditioning sets. Defaults to all.
    threads : int, default=1

    Returns
    -------
    W_hat : ndarray of int, shape (len(latents), M)
    p_values : ndarray, shape (len(latents), M)
        Unadjusted p-values.
    trivial : list of (i, j)
        Cells skipped because the null holds by construction.
    """
    latents = list(range(ds.n_latents)) if latents is None else [int(i) for i in latents]
    if ds.n < 40:
        raise DataError(f"need at least 40 rows, got {ds.n}")
    cells = [(r, i, j) for r, i in enumerate(latents) for j in range(ds.n_blocks)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _run_cell(ds, c[1], c[2], cfg), cells))
    else:
        results = [_run_cell(ds, i, j, cfg) for _, i, j in cells]
    p = np.empty((len(latents), ds.n_blocks))
    trivial = []
    for (r, i, j), (pv, is_trivial) in zip(cells, results):
        p[r, j] = pv
        if is_trivial:
            trivial.append((i, j))
    thresholded = citest.holm_adjust(p.ravel()).reshape(p.shape) if holm else p
    return (thresholded < cfg.alpha).astype(int), p, trivial


def tmex_score(V, W_hat):
    """Hamming distance between two binary matrices of equal shape."""
    V, W_hat = np.asarray(V), np.asarray(W_hat)
    if V.shape != W_hat.shape:
        raise ShapeError(f"V has shape {V.shape}, W_hat has shape {W_hat.shape}")
    return int(np.sum(V.astype(bool) != W_hat.astype(bool)))


def expected_bound(V, alpha, beta):
    """Upper bound on the expected score for valid level-``alpha`` tests with power ``beta``."""
    if not 0 < alpha <= 1 or not 0 <= beta <= 1:
        raise ValueError("alpha must lie in (0, 1] and beta in [0, 1]")
    V = np.asarray(V)
    ones = float(V.sum())
    return alpha * (V.size - ones) + (1.0 - beta) * ones


def oracle_w(model):
    """Rejection matrix of a perfect test: 1 wherever a latent is an effective parent."""
    W = np.zeros((model.n_latents, model.n_blocks), dtype=int)
    for j in range(model.n_blocks):
        W[list(model.effective_parents(j)), j] = 1
    return W


def oracle_score(hypothesis, truth, latents=None):
    """Score obtained with a zero-error test when ``truth`` generated the data."""
    rows = slice(None) if latents is None else list(latents)
    return tmex_score(adjacency(hypothesis)[rows], oracle_w(truth)[rows])


def fingerprint(cfg, holm, latents, n):
    payload = json.dumps({"cfg": cfg.to_dict(), "holm": bool(holm),
                          "latents": list(latents), "n": int(n)}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class TmexReport:
    V: np.ndarray
    W_hat: np.ndarray
    p_values: np.ndarray
    score: int
    alpha: float
    bound: float
    beta: float
    holm: bool
    latents: list
    fingerprint: str
    config: dict = field(default_factory=dict)
    trivial_cells: list = field(default_factory=list)
    n: int = 0

    def to_dict(self):
        return {
            "score": self.score,
            "alpha": self.alpha,
            "bound": self.bound,
            "beta": self.beta,
            "holm": self.holm,
            "n": self.n,
            "latents": [int(i) for i in self.latents],
            "V": self.V.tolist(),
            "W_hat": self.W_hat.tolist(),
            "p_values": self.p_values.tolist(),
            "trivial_cells": [list(c) for c in self.trivial_cells],
            "fingerprint": self.fingerprint,
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(V=np.asarray(d["V"], dtype=int), W_hat=np.asarray(d["W_hat"], dtype=int),
                   p_values=np.asarray(d["p_values"], dtype=float), score=int(d["score"]),
                   alpha=float(d["alpha"]), bound=float(d["bound"]), beta=float(d["beta"]),
                   holm=bool(d["holm"]), latents=list(d["latents"]), fingerprint=d["fingerprint"],
                   config=d.get("config", {}),
                   trivial_cells=[tuple(c) for c in d.get("trivial_cells", [])], n=int(d.get("n", 0)))

    def p_value_rows(self):
        """Rows for CSV export: header, then one labeled row per tested latent."""
        header = [""] + [f"A{j + 1}" for j in range(self.p_values.shape[1])]
        rows = [[f"z{i + 1}"] + [repr(float(v)) for v in row]
                for i, row in zip(self.latents, self.p_values)]
        return [header] + rows


def tmex_from_data(ds, model, cfg, holm=False, latents=None, beta=1.0, threads=1):
    """Full pipeline: hypothesized ``V`` from ``model``, tests, score and bound."""
    if ds.n_latents != model.n_latents:
        raise DataError(f"dataset has {ds.n_latents} latents, model has {model.n_latents}")
    if ds.block_offsets != offsets_from_dims(model.dims):
        raise DataError("dataset block layout does not match the model")
    latents = list(range(model.n_latents)) if latents is None else list(latents)
    V = adjacency(model)[latents]
    W_hat, p, trivial = estimate_w_hat(ds, cfg, holm=holm, latents=latents, threads=threads)
    return TmexReport(V=V, W_hat=W_hat, p_values=p, score=tmex_score(V, W_hat),
                      alpha=cfg.alpha, bound=expected_bound(V, cfg.alpha, beta), beta=beta,
                      holm=holm, latents=latents, fingerprint=fingerprint(cfg, holm, latents, ds.n),
                      config=cfg.to_dict(), trivial_cells=trivial, n=ds.n)


class TmexScorer(BaseEstimator):
    """Estimator-style front end for scoring a representation against a hypothesis.

    Parameters
    ----------
    model : MeasurementModel
        Hypothesized measurement model; only its parent sets matter.
    test : {"pcm", "gcm"}, default="pcm"
    regressor : RegressorSpec, optional
    alpha : float, default=0.05
    holm : bool, default=False
    latents : sequence of int, optional
    seed : int, default=0
    beta : float, default=1.0
        Assumed power, used only for the reported bound.

    Attributes
    ----------
    report_ : TmexReport
    score_ : int
    W_hat_ : ndarray
    p_values_ : ndarray
    """

    def __init__(self, model=None, test="pcm", regressor=None, alpha=0.05, holm=False,
                 latents=None, seed=0, beta=1.0):
        self.model = model
        self.test = test
        self.regressor = regressor
        self.alpha = alpha
        self.holm = holm
        self.latents = latents
        self.seed = seed
        self.beta = beta

    def _config(self):
        return citest.CiTestConfig(test=self.test, regressor=self.regressor or RegressorSpec(),
                                   alpha=self.alpha, seed=self.seed)

    def fit(self, Z, Zhat):
        if self.model is None:
            raise ConfigError("TmexScorer needs a hypothesized model")
        Z = as_matrix(Z, name="Z")
        Zhat = as_matrix(Zhat, n_rows=Z.shape[0], name="Zhat")
        ds = PairedDataset(Z, Zhat, offsets_from_dims(self.model.dims))
        self.report_ = tmex_from_data(ds, self.model, self._config(), holm=self.holm,
                                      latents=self.latents, beta=self.beta)
        self.score_ = self.report_.score
        self.W_hat_ = self.report_.W_hat
        self.p_values_ = self.report_.p_values
        return self
