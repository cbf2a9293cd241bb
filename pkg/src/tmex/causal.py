"""Downstream treatment-effect estimators used to check causal validity.

A measurement is a valid drop-in for a causal variable with respect to an
estimand when plugging it in leaves the estimand unchanged. These
estimators are the estimands: backdoor adjustment (linear and partially
linear), AIPW for randomized binary treatments, and the instrumental
variable ratio.
"""

from dataclasses import asdict, dataclass

import numpy as np
from scipy import linalg

from . import regress
from ._utils import as_matrix, as_vector, derive_seed
from .exceptions import (DegenerateError, OverlapError, SingularError, SmallSampleError,
                         WeakInstrumentError)

MIN_FIRST_STAGE_F = 10.0


@dataclass(frozen=True)
class AteResult:
    estimate: float
    std_error: float
    method: str
    n: int

    def to_dict(self):
        return asdict(self)


def _inputs(t, y, w):
    t = as_vector(t, name="t")
    n = t.shape[0]
    y = as_vector(y, n=n, name="y")
    w = np.zeros((n, 0)) if w is None or np.size(w) == 0 else as_matrix(w, n_rows=n, name="w")
    return t, y, w


def ate_linear_adjust(t, y, w=None):
    """OLS of ``y`` on ``[1, t, w]``; the ``t`` coefficient with its classical SE."""
    t, y, w = _inputs(t, y, w)
    n = t.shape[0]
    X = np.column_stack([np.ones(n), t, w])
    if n <= X.shape[1]:
        raise SmallSampleError("more parameters than observations")
    # Column-scaled conditioning check catches duplicated or collinear columns.
    norms = np.linalg.norm(X, axis=0)
    if np.any(norms == 0):
        raise SingularError("design has an all-zero column")
    s = np.linalg.svd(X / norms, compute_uv=False)
    if s[-1] == 0 or s[0] / s[-1] > 1e6:
        raise SingularError("design matrix is rank deficient")
    coef, *_ = linalg.lstsq(X, y)
    resid = y - X @ coef
    sigma2 = resid @ resid / (n - X.shape[1])
    cov = sigma2 * np.linalg.inv(X.T @ X)
    return AteResult(float(coef[1]), float(np.sqrt(max(cov[1, 1], 0.0))), "linear_adjust", n)


def ate_partially_linear(t, y, w, regressor=None, folds=2, seed=0):
    """Cross-fitted residual-on-residual estimate of a constant treatment effect.

    Both ``E[t | w]`` and ``E[y | w]`` are learned out of fold; the effect is
    ``sum(r_y r_t) / sum(r_t^2)`` and its standard error comes from the
    estimated influence function.
    """
    t, y, w = _inputs(t, y, w)
    n = t.shape[0]
    if n < 100:
        raise SmallSampleError(f"partially linear estimator needs n >= 100, got {n}")
    spec = regressor or regress.RegressorSpec()
    if w.shape[1] == 0:
        r_t, r_y = t - t.mean(), y - y.mean()
    else:
        r_t = t - regress.cross_fit(spec, w, t, folds, derive_seed(seed, "plm-t"))
        r_y = y - regress.cross_fit(spec, w, y, folds, derive_seed(seed, "plm-y"))
    denom = r_t @ r_t
    if denom < 1e-10 * n:
        raise DegenerateError("treatment is (nearly) determined by the adjustment set")
    theta = float(r_y @ r_t / denom)
    psi = (r_y - theta * r_t) * r_t
    se = np.sqrt(np.mean(psi**2) / (denom / n) ** 2 / n)
    return AteResult(theta, float(se), "partially_linear", n)


def ate_aipw(t, y, w=None, propensity=0.5, outcome_regressor=None, folds=2, seed=0,
             min_arm_size=20):
    """Augmented inverse propensity weighting with a known propensity.

    Outcome models for each arm are cross-fitted on ``w``; with no
    covariates they reduce to out-of-fold arm means.

    Parameters
    ----------
    t : array of {0, 1}
    y : array
    w : array of shape (n, d), optional
    propensity : float or array
        Known treatment probability, e.g. 0.5 in a balanced trial.
    min_arm_size : int, default=20
    """
    t, y, w = _inputs(t, y, w)
    n = t.shape[0]
    if not np.all((t == 0) | (t == 1)):
        raise ValueError("treatment must be binary")
    n1 = int(t.sum())
    if n1 < min_arm_size or n - n1 < min_arm_size:
        raise SmallSampleError(f"each arm needs at least {min_arm_size} units")
    e = np.broadcast_to(np.asarray(propensity, dtype=float), (n,))
    if np.any((e < 0.01) | (e > 0.99)):
        raise OverlapError("propensity scores must lie in [0.01, 0.99]")
    spec = outcome_regressor or regress.RegressorSpec()
    ids = regress.fold_ids(n, folds, derive_seed(seed, "aipw"))
    mu1, mu0 = np.empty(n), np.empty(n)
    for k in range(folds):
        test, train = ids == k, ids != k
        for arm, mu in ((1, mu1), (0, mu0)):
            sel = train & (t == arm)
            if sel.sum() < 2:
                raise SmallSampleError("a training fold has fewer than 2 units in one arm")
            model = regress.fit(spec, w[sel], y[sel])
            mu[test] = model.predict(w[test])
    psi = mu1 - mu0 + t * (y - mu1) / e - (1 - t) * (y - mu0) / (1 - e)
    return AteResult(float(psi.mean()), float(psi.std(ddof=1) / np.sqrt(n)), "aipw", n)


def ate_iv(t, y, instrument):
    """Instrumental-variable ratio ``cov(y, i) / cov(t, i)`` with a delta-method SE.

    Raises :class:`WeakInstrumentError` when the first-stage F statistic of
    ``t`` on the instrument is below 10 (or the covariance is numerically
    zero).
    """
    t, y, _ = _inputs(t, y, None)
    i = as_vector(instrument, n=t.shape[0], name="instrument")
    n = t.shape[0]
    ic, tc, yc = i - i.mean(), t - t.mean(), y - y.mean()
    cov_ti = ic @ tc / (n - 1)
    if abs(cov_ti) <= 1e-10:
        raise WeakInstrumentError("instrument is uncorrelated with the treatment")
    r = cov_ti / np.sqrt((ic @ ic) * (tc @ tc) / (n - 1) ** 2)
    f_stat = r**2 / max(1.0 - r**2, 1e-300) * (n - 2)
    if f_stat < MIN_FIRST_STAGE_F:
        raise WeakInstrumentError(f"first-stage F statistic {f_stat:.2f} is below {MIN_FIRST_STAGE_F}")
    beta = float((ic @ yc) / (ic @ tc))
    psi = ic * (yc - beta * tc) / cov_ti
    return AteResult(beta, float(np.sqrt(np.mean(psi**2) / n)), "iv_ratio", n)


def ate_bias(result, truth):
    """Absolute deviation of an estimate from the true effect."""
    return abs(result.estimate - truth)
