"""External-regret baselines over the deterministic policies of one tree."""

from __future__ import annotations

from typing import ClassVar, Optional

import numpy as np
from scipy.special import softmax

from ..feedback.estimators import ix_estimator
from ..games.environment import Trajectory
from ..games.policy import behavioral_to_seq
from ..games.tree import GameTree
from ..partition.trigger import incremental_recursion
from ..partition.vertex import log_partition_vertex
from ..telemetry.base import Events, TelemetrySink
from ..triggers.vertices import DEFAULT_ENUMERATION_CAP, enumerate_policies
from .base import Algorithm, BaseLearner


class VertexLearner(BaseLearner):
    """Accumulates vector losses; bandit feedback goes through the IX estimator."""

    uses_triggers = False

    def __init__(
        self,
        tree: GameTree,
        *,
        eta: float,
        gamma: float = 0.0,
        telemetry: Optional[TelemetrySink] = None,
    ) -> None:
        super().__init__(tree, eta=eta, gamma=gamma, telemetry=telemetry)
        self.cumulative_loss = np.zeros(tree.num_sequences)
        self._policy = np.zeros(tree.num_sequences)

    @property
    def policy(self) -> np.ndarray:
        return self._policy

    def _observe_full(self, loss: np.ndarray) -> None:
        self.cumulative_loss += loss
        self._step(loss)

    def _observe_bandit(self, trajectory: Trajectory) -> None:
        estimate = ix_estimator(self.tree, trajectory, self._policy, self.gamma)
        self.cumulative_loss += estimate
        self._step(estimate)

    def _step(self, loss: np.ndarray) -> None:
        self._refresh()


class VertexMwu(VertexLearner):
    """Multiplicative weights over the enumerated deterministic policies."""

    algorithm = Algorithm.VERTEX_MWU
    enumerates: ClassVar[bool] = True
    _state_keys = ("cumulative_loss", "log_weights")

    def __init__(
        self,
        tree: GameTree,
        *,
        eta: float,
        gamma: float = 0.0,
        telemetry: Optional[TelemetrySink] = None,
        enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    ) -> None:
        super().__init__(tree, eta=eta, gamma=gamma, telemetry=telemetry)
        self.vertices = np.array(enumerate_policies(tree, enumeration_cap))
        self.log_weights = np.zeros(len(self.vertices))
        self._refresh()

    def _step(self, loss: np.ndarray) -> None:
        self.log_weights = self.log_weights - self.eta * (self.vertices @ loss)
        self._refresh()

    def _refresh(self) -> None:
        self._policy = softmax(self.log_weights) @ self.vertices


class DilatedOmd(VertexLearner):
    """FTRL with the dilated entropy: the played policy is ``-grad log Z(eta * L)``."""

    algorithm = Algorithm.DILATED_OMD
    _state_keys = ("cumulative_loss",)

    def __init__(
        self,
        tree: GameTree,
        *,
        eta: float,
        gamma: float = 0.0,
        telemetry: Optional[TelemetrySink] = None,
    ) -> None:
        super().__init__(tree, eta=eta, gamma=gamma, telemetry=telemetry)
        self._refresh()

    def _refresh(self) -> None:
        self._policy = log_partition_vertex(self.tree, self.eta * self.cumulative_loss).policy


class DilatedOmdIncremental(VertexLearner):
    """Same iterates as ``DilatedOmd`` from an O(XA) update of the log conditionals."""

    algorithm = Algorithm.DILATED_OMD_INC
    incremental: ClassVar[bool] = True
    _state_keys = ("cumulative_loss", "log_beh")

    def __init__(
        self,
        tree: GameTree,
        *,
        eta: float,
        gamma: float = 0.0,
        telemetry: Optional[TelemetrySink] = None,
        resync_every: int = 0,
    ) -> None:
        super().__init__(tree, eta=eta, gamma=gamma, telemetry=telemetry)
        if resync_every < 0:
            raise ValueError(f"resync_every must be nonnegative, got {resync_every}")
        self.resync_every = resync_every
        self._rebuild_from_cumulative()

    def _rebuild_from_cumulative(self) -> None:
        beh = log_partition_vertex(self.tree, self.eta * self.cumulative_loss).behavioral
        with np.errstate(divide="ignore"):
            self.log_beh = np.log(beh)
        self._refresh()

    def _step(self, loss: np.ndarray) -> None:
        _, updated = incremental_recursion(self.tree, self.eta * loss[:, None], self.log_beh[:, :, None])
        self.log_beh = updated[:, :, 0]
        if self.resync_every and (self.t + 1) % self.resync_every == 0:
            before = self._policy_from_log_beh()
            self._rebuild_from_cumulative()
            self.telemetry.emit(
                Events.LEARNER_RESYNCED,
                {
                    "algorithm": self.algorithm.value,
                    "t": self.t + 1,
                    "drift": float(np.abs(before - self._policy).max()),
                },
            )
            return
        self._refresh()

    def _policy_from_log_beh(self) -> np.ndarray:
        return behavioral_to_seq(self.tree, np.exp(self.log_beh), tol=1e-9)

    def _refresh(self) -> None:
        self._policy = self._policy_from_log_beh()


__all__ = ["VertexLearner", "VertexMwu", "DilatedOmd", "DilatedOmdIncremental"]
