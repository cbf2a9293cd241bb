"""Test-based measurement exclusivity (T-MEX).

Scores a learned representation against a hypothesized measurement model
by testing, for every latent/block pair, whether the block carries
information about the latent beyond the other latents.
"""

from .causal import AteResult, ate_aipw, ate_bias, ate_iv, ate_linear_adjust, ate_partially_linear
from .citest import CiTestConfig, TestOutcome, gcm_test, holm_adjust, pcm_test
from .discovery import DirectLingam, DiscoveryConfig, causal_order, distance_correlation, prune_edges
from .exceptions import *  # noqa: F401,F403
from .measurement import (MeasurementBlock, MeasurementFn, MeasurementModel, MeasurementTransformer,
                          PairedDataset, adjacency, make_model_abc, realize)
from .metrics import mann_whitney_u, mcc, pearson, r2_score, shd, spearman, ks_uniform
from .regress import KernelRidgeRegressor, OLSRegressor, RegressorSpec
from .scenarios import ScenarioConfig, ScenarioReport, run_scenario
from .scm import Dag, ScmSpec, random_dag, random_scm, sample_scm, simulation_scm
from .score import TmexReport, TmexScorer, expected_bound, oracle_score, tmex_from_data, tmex_score

__version__ = "0.1.0"
