"""scikit-learn estimator protocol checks for the public estimators."""

import pytest
from sklearn.base import clone
from sklearn.utils.estimator_checks import check_estimator

from tmex.discovery import DirectLingam
from tmex.measurement import MeasurementTransformer, make_model_abc
from tmex.regress import KernelRidgeRegressor, OLSRegressor
from tmex.score import TmexScorer


@pytest.mark.parametrize("est", [OLSRegressor(), KernelRidgeRegressor()])
def test_regressors_pass_sklearn_checks(est):
    # zero-column designs are accepted on purpose: they fit an intercept-only model
    check_estimator(est, expected_failed_checks={
        "check_estimators_empty_data_messages": "zero features is the intercept-only model"})


@pytest.mark.parametrize("est", [DirectLingam(prune_threshold=0.1), TmexScorer(make_model_abc("A"), seed=3),
                                 MeasurementTransformer(make_model_abc("C"), seed=2)])
def test_clone_preserves_params(est):
    assert clone(est).get_params() == est.get_params()
