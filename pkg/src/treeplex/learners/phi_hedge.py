from __future__ import annotations

from typing import ClassVar, Optional

import numpy as np
from scipy.special import softmax

from ..feedback.losses import LossMatrix
from ..games.tree import GameTree
from ..partition.oracle import vertex_scores
from ..telemetry.base import TelemetrySink
from ..triggers.profile import profile_from_vertices
from ..triggers.vertices import DEFAULT_ENUMERATION_CAP, enumerate_trigger_vertices
from .base import Algorithm
from .hyperparams import phi_hedge_regret_bound
from .trigger_base import TriggerLearner


class PhiHedge(TriggerLearner):
    """Hedge over the enumerated deterministic trigger modifications (oracle scale only)."""

    algorithm = Algorithm.PHI_HEDGE
    enumerates: ClassVar[bool] = True
    _state_keys = ("cumulative", "log_weights", "second_moment")

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
        self.vertices = enumerate_trigger_vertices(tree, enumeration_cap)
        self.log_weights = np.zeros(len(self.vertices))
        self.second_moment = np.zeros(())
        self._refresh()

    @property
    def vertex_weights(self) -> np.ndarray:
        return softmax(self.log_weights)

    def _step(self, M: LossMatrix) -> None:
        scores = vertex_scores(self.tree, self.vertices, M.dense())
        self.second_moment = self.second_moment + float(softmax(self.log_weights) @ scores**2)
        self.log_weights = self.log_weights - self.eta * scores
        self._refresh()

    def _refresh(self) -> None:
        self._set_profile(profile_from_vertices(self.tree, self.vertices, softmax(self.log_weights)))

    def regret_bound(self) -> float:
        return phi_hedge_regret_bound(len(self.vertices), self.eta, float(self.second_moment))


__all__ = ["PhiHedge"]
