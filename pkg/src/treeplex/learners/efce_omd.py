"""Trigger-regret OMD learners with the dilated-entropy trigger regularizer.

``EfceOmd`` evaluates the log-partition of the scaled cumulative matrix loss
from scratch each episode (FTRL form, O(X^2 A^2) per step).
``EfceOmdIncremental`` keeps log lambda and per-trigger log conditionals and
only touches the nonzero columns of the newest loss; its iterates match the
FTRL form up to floating point, and ``resync_every`` rebuilds the state from
the cumulative loss periodically. The balanced variants weight the inner
recursions by the balanced exploration policies and scale the outer
aggregate by XA.
"""

from __future__ import annotations

from typing import ClassVar, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from ..feedback.losses import LossMatrix
from ..games.tree import GameTree
from ..partition.trigger import TriggerGradient, incremental_recursion, sequence_form_columns, weighted_log_partition
from ..telemetry.base import Events, TelemetrySink
from ..triggers.profile import TriggerProfile, untriggered_from_diagonal
from .base import Algorithm
from .trigger_base import TriggerLearner


def _safe_log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(values)


class EfceOmd(TriggerLearner):
    algorithm = Algorithm.EFCE_OMD
    _state_keys = ("cumulative",)

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

    def gradient(self) -> TriggerGradient:
        assert self.cumulative is not None
        return weighted_log_partition(self.tree, self.eta * self.cumulative, self.weights, self.outer_scale)

    def _step(self, M: LossMatrix) -> None:
        self._refresh()

    def _refresh(self) -> None:
        self._set_profile(self.gradient().profile)


class BalancedEfceOmd(EfceOmd):
    algorithm = Algorithm.BALANCED_EFCE_OMD
    balanced = True


class EfceOmdIncremental(TriggerLearner):
    algorithm = Algorithm.EFCE_OMD_INC
    incremental: ClassVar[bool] = True
    _state_keys = ("cumulative", "log_lam", "log_beh", "increments")

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
        # increments[x, j]: sum of per-step recursion increments; with the
        # value at zero it telescopes to the FTRL recursion value
        self.increments = np.zeros((tree.num_infosets, tree.num_sequences))
        self._rebuild_from_cumulative()
        if not resync_every:
            # only a resync reads the cumulative loss back
            self.cumulative = None

    def state_keys(self) -> Tuple[str, ...]:
        if self.cumulative is None:
            return tuple(key for key in self._state_keys if key != "cumulative")
        return self._state_keys

    def _full_gradient(self) -> TriggerGradient:
        assert self.cumulative is not None
        return weighted_log_partition(self.tree, self.eta * self.cumulative, self.weights, self.outer_scale)

    def _rebuild_from_cumulative(self) -> None:
        g = self._full_gradient()
        self.log_lam = _safe_log(g.lam)
        self.log_beh = _safe_log(g.behavioral)
        self._set_profile(g.profile)

    def _step(self, M: LossMatrix) -> None:
        tree = self.tree
        A = tree.num_actions
        cols = M.nonzero_columns()
        root_increment = np.zeros(tree.num_sequences)
        if len(cols):
            weights = None if self.weights is None else self.weights[:, cols]
            F, updated = incremental_recursion(tree, self.eta * M.column_block(cols), self.log_beh[:, :, cols], weights)
            self.log_beh[:, :, cols] = updated
            self.increments[:, cols] += F
            root_increment[cols] = F[cols // A, np.arange(len(cols))]
        untriggered = untriggered_from_diagonal(tree, M.diagonal(), cols)
        logits = self.log_lam + (-self.eta * untriggered + root_increment) / self.outer_scale
        self.log_lam = logits - logsumexp(logits)

        if self.resync_every and (self.t + 1) % self.resync_every == 0:
            before = np.exp(self.log_lam)
            self._rebuild_from_cumulative()
            self.telemetry.emit(
                Events.LEARNER_RESYNCED,
                {
                    "algorithm": self.algorithm.value,
                    "t": self.t + 1,
                    "drift": float(np.abs(before - self.profile.lam).max()),
                },
            )
            return

        m = self.profile.m.copy()
        if len(cols):
            m[:, cols] = sequence_form_columns(tree, np.exp(self.log_beh[:, :, cols]), cols)
        self._set_profile(TriggerProfile(lam=np.exp(self.log_lam), m=m))

    def _refresh(self) -> None:
        m = sequence_form_columns(self.tree, np.exp(self.log_beh))
        self._set_profile(TriggerProfile(lam=np.exp(self.log_lam), m=m))


class BalancedEfceOmdIncremental(EfceOmdIncremental):
    algorithm = Algorithm.BALANCED_EFCE_OMD_INC
    balanced = True


__all__ = ["EfceOmd", "EfceOmdIncremental", "BalancedEfceOmd", "BalancedEfceOmdIncremental"]
