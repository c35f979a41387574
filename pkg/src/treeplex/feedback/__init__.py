"""Full-information losses, trajectory sampling and bandit loss estimators."""

from .estimators import (
    adaptive_estimator,
    adaptive_expectation,
    balanced_ix_estimator,
    balanced_reach,
    ix_estimator,
    ix_expectation,
)
from .losses import LossMatrix, assemble_adaptive_matrix, assemble_matrix, expected_loss
from .sampling import episode_rng, sample_trajectory

__all__ = [
    "LossMatrix",
    "expected_loss",
    "assemble_matrix",
    "assemble_adaptive_matrix",
    "episode_rng",
    "sample_trajectory",
    "ix_estimator",
    "balanced_ix_estimator",
    "adaptive_estimator",
    "balanced_reach",
    "ix_expectation",
    "adaptive_expectation",
]
