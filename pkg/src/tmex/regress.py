"""Regression backends: ridge-stabilized OLS and RBF kernel ridge regression.

Both regressors follow the scikit-learn estimator protocol (``fit`` returns
``self``, hyper-parameters live in ``__init__``, learned state carries a
trailing underscore), so they can be cloned, grid-searched or dropped into
pipelines. The module-level :func:`fit`, :func:`predict` and
:func:`cross_fit` helpers take a :class:`RegressorSpec` instead, which is the
serializable form used in test and estimator configs.

A design with zero columns is allowed everywhere and yields an
intercept-only model that predicts the training mean.
"""

from dataclasses import asdict, dataclass

import numpy as np
from scipy import linalg
from scipy.spatial.distance import pdist
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from ._utils import as_matrix, as_vector, derive_seed
from .exceptions import ConfigError, DimError, SingularError

MAX_CONDITION = 1e12
MEDIAN_SUBSAMPLE = 1000


def _check_xy(X, y):
    """Lenient coercion for the module-level helpers: 1-D ``X`` becomes one column."""
    X = as_matrix(X, name="X")
    y = as_vector(y, n=X.shape[0], name="y")
    if X.shape[0] < 2:
        raise ValueError(f"need at least 2 samples to fit, got n_samples = {X.shape[0]}")
    return X, y


def _validate_fit(est, X, y):
    X, y = validate_data(est, X, y, ensure_min_features=0, y_numeric=True)
    if X.shape[0] < 2:
        raise ValueError(f"need at least 2 samples to fit, got n_samples = {X.shape[0]}")
    return X, y.astype(float)


def _check_predict_width(est, X):
    X = check_array(X, ensure_min_features=0)
    if X.shape[1] != est.n_features_in_:
        raise DimError(f"X has {X.shape[1]} features, but {type(est).__name__} "
                       f"is expecting {est.n_features_in_} features as input")
    return validate_data(est, X, reset=False, ensure_min_features=0)


class OLSRegressor(RegressorMixin, BaseEstimator):
    """Least squares with an optional tiny ridge stabilizer.

    The intercept is handled by centering ``X`` and ``y`` so the stabilizer
    never shrinks it.

    Parameters
    ----------
    ridge : float, default=1e-8
        Added to the diagonal of the centered Gram matrix.
    fit_intercept : bool, default=True
    """

    def __init__(self, ridge=1e-8, fit_intercept=True):
        self.ridge = ridge
        self.fit_intercept = fit_intercept

    def fit(self, X, y):
        X, y = _validate_fit(self, X, y)
        if self.ridge < 0:
            raise ConfigError("ridge must be nonnegative")
        self.n_features_in_ = X.shape[1]
        if self.fit_intercept:
            x_mean, y_mean = X.mean(axis=0), y.mean()
        else:
            x_mean, y_mean = np.zeros(X.shape[1]), 0.0
        if X.shape[1] == 0:
            self.coef_ = np.zeros(0)
            self.intercept_ = float(y_mean)
            return self
        Xc, yc = X - x_mean, y - y_mean
        gram = Xc.T @ Xc
        gram[np.diag_indices_from(gram)] += self.ridge
        # Scale-free conditioning check on the correlation-scaled Gram matrix.
        scale = np.sqrt(np.clip(np.diag(gram), 1e-300, None))
        cond = np.linalg.cond(gram / np.outer(scale, scale))
        if not np.isfinite(cond) or cond > MAX_CONDITION:
            raise SingularError(f"normal equations are singular (condition {cond:.3g})")
        self.coef_ = linalg.solve(gram, Xc.T @ yc, assume_a="pos")
        self.intercept_ = float(y_mean - x_mean @ self.coef_)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = _check_predict_width(self, X)
        return X @ self.coef_ + self.intercept_


def median_heuristic(X, max_rows=MEDIAN_SUBSAMPLE):
    """Median pairwise Euclidean distance between rows of ``X``.

    For more than ``max_rows`` rows a fixed-seed subsample of ``max_rows``
    rows is used.
    """
    X = as_matrix(X, name="X")
    if X.shape[0] > max_rows:
        idx = np.sort(np.random.default_rng(0).choice(X.shape[0], max_rows, replace=False))
        X = X[idx]
    d = pdist(X)
    if d.size == 0:
        return 1.0
    med = float(np.median(d))
    return med if med > 0 else 1.0


def rbf_kernel(A, B, bandwidth):
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-sq / (2.0 * bandwidth**2))


class KernelRidgeRegressor(RegressorMixin, BaseEstimator):
    """Kernel ridge regression with a Gaussian (RBF) kernel.

    Solves ``(K + n * alpha * I) a = y - mean(y)``; the training mean is
    added back at prediction time, so constant targets are reproduced
    exactly.

    Parameters
    ----------
    alpha : float, default=1e-3
        Regularization strength (scaled by the sample size).
    bandwidth : "median" or float, default="median"
        Kernel length scale; ``"median"`` applies the median heuristic to
        the training inputs.
    """

    def __init__(self, alpha=1e-3, bandwidth="median"):
        self.alpha = alpha
        self.bandwidth = bandwidth

    def fit(self, X, y):
        X, y = _validate_fit(self, X, y)
        if not self.alpha > 0:
            raise ConfigError("kernel ridge alpha must be positive")
        n = X.shape[0]
        self.n_features_in_ = X.shape[1]
        self.y_mean_ = float(y.mean())
        self.X_fit_ = X.copy()
        if X.shape[1] == 0:
            self.bandwidth_ = 1.0
            self.dual_coef_ = np.zeros(n)
            return self
        if self.bandwidth == "median":
            self.bandwidth_ = median_heuristic(X)
        else:
            self.bandwidth_ = float(self.bandwidth)
            if not self.bandwidth_ > 0:
                raise ConfigError("fixed bandwidth must be positive")
        K = rbf_kernel(X, X, self.bandwidth_)
        rhs = y - self.y_mean_
        for factor in (1.0, 10.0, 100.0):
            lhs = K + n * self.alpha * factor * np.eye(n)
            try:
                chol = linalg.cho_factor(lhs, lower=True, check_finite=False)
            except linalg.LinAlgError:
                continue
            self.dual_coef_ = linalg.cho_solve(chol, rhs, check_finite=False)
            self.alpha_used_ = self.alpha * factor
            return self
        raise SingularError("kernel system not positive definite after jitter escalation")

    def predict(self, X):
        check_is_fitted(self, "dual_coef_")
        X = _check_predict_width(self, X)
        if X.shape[1] == 0:
            return np.full(X.shape[0], self.y_mean_)
        return rbf_kernel(X, self.X_fit_, self.bandwidth_) @ self.dual_coef_ + self.y_mean_


@dataclass(frozen=True)
class RegressorSpec:
    """Serializable choice of regression backend.

    ``bandwidth`` is ``"median"`` for the median heuristic or a positive
    float for a fixed RBF length scale.
    """

    kind: str = "ols"
    ridge: float = 1e-8
    intercept: bool = True
    alpha: float = 1e-3
    bandwidth: object = "median"

    def __post_init__(self):
        if self.kind not in ("ols", "kernel_ridge"):
            raise ConfigError(f"unknown regressor kind {self.kind!r}")
        if self.ridge < 0:
            raise ConfigError("ridge must be nonnegative")
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        if self.bandwidth != "median":
            try:
                bw = float(self.bandwidth)
            except (TypeError, ValueError):
                raise ConfigError(f"bandwidth must be 'median' or a number, got {self.bandwidth!r}")
            if not bw > 0:
                raise ConfigError("bandwidth must be positive")

    def build(self):
        if self.kind == "ols":
            return OLSRegressor(ridge=self.ridge, fit_intercept=self.intercept)
        return KernelRidgeRegressor(alpha=self.alpha, bandwidth=self.bandwidth)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        unknown = set(d) - {"kind", "ridge", "intercept", "alpha", "bandwidth"}
        if unknown:
            raise ConfigError(f"unknown regressor keys: {sorted(unknown)}")
        return cls(**d)


def fit(spec, X, y):
    """Fit the regressor described by ``spec`` and return the fitted estimator.

    Unlike the estimator classes, a 1-D ``X`` is accepted as a single column.
    """
    X, y = _check_xy(X, y)
    return spec.build().fit(X, y)


def predict(fitted, X):
    return fitted.predict(as_matrix(X, name="X"))


def fold_ids(n, folds, seed):
    """Assign each of ``n`` rows to one of ``folds`` contiguous chunks of a seeded shuffle."""
    if folds < 2:
        raise ValueError("folds must be at least 2")
    if n < folds:
        raise ValueError(f"need at least {folds} rows for {folds} folds, got {n}")
    perm = np.random.default_rng(derive_seed(seed, "folds")).permutation(n)
    ids = np.empty(n, dtype=int)
    for k, chunk in enumerate(np.array_split(perm, folds)):
        ids[chunk] = k
    return ids


def cross_fit(spec, X, y, folds=2, seed=0):
    """Out-of-fold predictions: row k is predicted by a model not trained on it."""
    X, y = _check_xy(X, y)
    ids = fold_ids(X.shape[0], folds, seed)
    out = np.empty(X.shape[0])
    for k in range(folds):
        test = ids == k
        model = fit(spec, X[~test], y[~test])
        out[test] = model.predict(X[test])
    return out
