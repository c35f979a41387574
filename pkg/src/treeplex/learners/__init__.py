"""No-regret learners: trigger-regret (EFCE) learners and external-regret baselines."""

from .base import SNAPSHOT_VERSION, Algorithm, BaseLearner, Feedback, LearnerSnapshot
from .efce_omd import BalancedEfceOmd, BalancedEfceOmdIncremental, EfceOmd, EfceOmdIncremental
from .hyperparams import (
    DEFAULT_DELTA,
    DEFAULT_ETA_CONSTANT,
    HyperParameters,
    balanced_defaults,
    bandit_defaults,
    full_feedback_defaults,
    phi_hedge_regret_bound,
    tuned_defaults,
    vertex_defaults,
)
from .phi_hedge import PhiHedge
from .registry import LearnerRegistry, build_learner
from .trigger_base import TriggerLearner
from .vertex import DilatedOmd, DilatedOmdIncremental, VertexLearner, VertexMwu

__all__ = [
    "Algorithm",
    "Feedback",
    "BaseLearner",
    "LearnerSnapshot",
    "SNAPSHOT_VERSION",
    "TriggerLearner",
    "PhiHedge",
    "EfceOmd",
    "EfceOmdIncremental",
    "BalancedEfceOmd",
    "BalancedEfceOmdIncremental",
    "VertexLearner",
    "VertexMwu",
    "DilatedOmd",
    "DilatedOmdIncremental",
    "HyperParameters",
    "DEFAULT_DELTA",
    "DEFAULT_ETA_CONSTANT",
    "full_feedback_defaults",
    "bandit_defaults",
    "balanced_defaults",
    "vertex_defaults",
    "tuned_defaults",
    "phi_hedge_regret_bound",
    "LearnerRegistry",
    "build_learner",
]
