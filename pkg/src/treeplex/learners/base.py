from __future__ import annotations

import abc
from enum import Enum
from typing import Any, ClassVar, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..games.environment import Trajectory
from ..games.tree import GameTree
from ..telemetry.base import TelemetrySink, resolve_sink

SNAPSHOT_VERSION = 1


class Algorithm(str, Enum):
    """Learner families selectable from the CLI and run configs."""

    PHI_HEDGE = "phi-hedge"
    EFCE_OMD = "efce-omd"
    EFCE_OMD_INC = "efce-omd-inc"
    BALANCED_EFCE_OMD = "balanced-efce-omd"
    BALANCED_EFCE_OMD_INC = "balanced-efce-omd-inc"
    VERTEX_MWU = "vertex-mwu"
    DILATED_OMD = "dilated-omd"
    DILATED_OMD_INC = "dilated-omd-inc"


class Feedback(str, Enum):
    FULL = "full"
    BANDIT = "bandit"


class LearnerSnapshot(BaseModel):
    """Structured-text dump of a learner's mutable state for deterministic resume."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    schema_version: int = SNAPSHOT_VERSION
    algorithm: Algorithm
    eta: float
    gamma: float
    t: int = Field(ge=0)
    arrays: Dict[str, Any] = Field(default_factory=dict)


class BaseLearner(abc.ABC):
    """A no-regret learner over the sequence-form policies of one tree.

    ``policy`` is the iterate for the next episode; ``update`` consumes the
    full expected loss vector and ``update_bandit`` a sampled trajectory.
    Subclasses list the attributes holding their mutable arrays in
    ``_state_keys`` so snapshots need no per-class code.
    """

    algorithm: ClassVar[Algorithm]
    uses_triggers: ClassVar[bool] = True
    _state_keys: ClassVar[Tuple[str, ...]] = ()

    def __init__(
        self,
        tree: GameTree,
        *,
        eta: float,
        gamma: float = 0.0,
        telemetry: Optional[TelemetrySink] = None,
    ) -> None:
        if eta <= 0.0:
            raise ValueError(f"learning rate must be positive, got {eta}")
        if gamma < 0.0:
            raise ValueError(f"IX parameter must be nonnegative, got {gamma}")
        self.tree = tree
        self.eta = float(eta)
        self.gamma = float(gamma)
        self.t = 0
        self.telemetry = resolve_sink(telemetry)

    @property
    @abc.abstractmethod
    def policy(self) -> np.ndarray:  # pragma: no cover - interface
        ...

    def residual(self) -> float:
        """Fixed-point residual of the current policy; zero for learners that play their iterate directly."""

        return 0.0

    def update(self, loss: np.ndarray) -> None:
        loss = np.asarray(loss, dtype=float)
        if loss.shape != (self.tree.num_sequences,):
            raise ValueError(f"loss must have length {self.tree.num_sequences}, got shape {loss.shape}")
        self._observe_full(loss)
        self.t += 1

    def update_bandit(self, trajectory: Trajectory) -> None:
        self._observe_bandit(trajectory)
        self.t += 1

    @abc.abstractmethod
    def _observe_full(self, loss: np.ndarray) -> None:  # pragma: no cover - interface
        ...

    @abc.abstractmethod
    def _observe_bandit(self, trajectory: Trajectory) -> None:  # pragma: no cover - interface
        ...

    def _refresh(self) -> None:
        """Recompute derived quantities (the played policy) after a restore."""

    def state_keys(self) -> Tuple[str, ...]:
        return self._state_keys

    def snapshot(self) -> LearnerSnapshot:
        arrays = {key: np.asarray(getattr(self, key)).tolist() for key in self.state_keys()}
        return LearnerSnapshot(algorithm=self.algorithm, eta=self.eta, gamma=self.gamma, t=self.t, arrays=arrays)

    def restore(self, snapshot: LearnerSnapshot) -> None:
        if snapshot.schema_version != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {snapshot.schema_version}")
        if snapshot.algorithm is not self.algorithm:
            raise ValueError(f"snapshot is for {snapshot.algorithm.value}, not {self.algorithm.value}")
        missing = [key for key in self.state_keys() if key not in snapshot.arrays]
        if missing:
            raise ValueError(f"snapshot is missing {', '.join(missing)}")
        self.eta = snapshot.eta
        self.gamma = snapshot.gamma
        self.t = snapshot.t
        for key in self.state_keys():
            setattr(self, key, np.asarray(snapshot.arrays[key], dtype=float))
        self._refresh()

    def __repr__(self) -> str:
        return f"{type(self).__name__}(t={self.t}, eta={self.eta:.4g}, gamma={self.gamma:.4g}, {self.tree!r})"


__all__ = ["Algorithm", "Feedback", "BaseLearner", "LearnerSnapshot", "SNAPSHOT_VERSION"]
