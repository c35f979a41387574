from __future__ import annotations

from typing import ClassVar, Optional

import numpy as np

from ..feedback.estimators import adaptive_estimator, balanced_reach, ix_estimator
from ..feedback.losses import LossMatrix, assemble_adaptive_matrix, assemble_matrix
from ..games.environment import Trajectory
from ..games.policy import balanced_policies
from ..games.tree import GameTree
from ..partition.balanced import balanced_weights
from ..telemetry.base import TelemetrySink
from ..triggers.fixed_point import fixed_point, fixed_point_residual
from ..triggers.profile import TriggerProfile
from .base import BaseLearner


class TriggerLearner(BaseLearner):
    """Shared plumbing of the trigger-regret learners.

    Each step turns feedback into a matrix loss against the policy just
    played, folds it into ``cumulative`` (sum of matrix losses, None when the
    subclass never reads it) and lets the subclass produce the next
    (lambda, m); the played policy is its fixed point.
    Balanced subclasses weight the recursion by the balanced exploration
    policies and use the adaptive estimator family under bandit feedback.
    """

    balanced: ClassVar[bool] = False

    def __init__(
        self,
        tree: GameTree,
        *,
        eta: float,
        gamma: float = 0.0,
        telemetry: Optional[TelemetrySink] = None,
    ) -> None:
        super().__init__(tree, eta=eta, gamma=gamma, telemetry=telemetry)
        XA = tree.num_sequences
        self.cumulative: Optional[np.ndarray] = np.zeros((XA, XA))
        if self.balanced:
            self.balanced_policies = balanced_policies(tree)
            self.weights: Optional[np.ndarray] = balanced_weights(tree, self.balanced_policies)
            self.outer_scale = float(XA)
            self.star: Optional[np.ndarray] = balanced_reach(tree, self.balanced_policies)
        else:
            self.weights = None
            self.outer_scale = 1.0
            self.star = None
        self._profile: Optional[TriggerProfile] = None
        self._policy = np.zeros(XA)

    @property
    def policy(self) -> np.ndarray:
        return self._policy

    @property
    def profile(self) -> TriggerProfile:
        assert self._profile is not None
        return self._profile

    def residual(self) -> float:
        return fixed_point_residual(self.tree, self.profile, self._policy)

    def _set_profile(self, profile: TriggerProfile) -> None:
        self._profile = profile
        self._policy = fixed_point(self.tree, profile, telemetry=self.telemetry)

    def _observe_full(self, loss: np.ndarray) -> None:
        self._apply(assemble_matrix(loss, self._policy))

    def _observe_bandit(self, trajectory: Trajectory) -> None:
        if self.balanced:
            assert self.star is not None
            family = adaptive_estimator(self.tree, trajectory, self._policy, self.profile, self.star, self.gamma)
            self._apply(assemble_adaptive_matrix(family, self._policy))
        else:
            estimate = ix_estimator(self.tree, trajectory, self._policy, self.gamma)
            self._apply(assemble_matrix(estimate, self._policy))

    def _apply(self, M: LossMatrix) -> None:
        if self.cumulative is not None:
            M.add_to(self.cumulative)
        self._step(M)

    def _step(self, M: LossMatrix) -> None:  # pragma: no cover - overridden
        raise NotImplementedError


__all__ = ["TriggerLearner"]
