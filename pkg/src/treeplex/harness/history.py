from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..games.environment import Trajectory
from ..games.tree import GameTree


@dataclass
class MetricRow:
    t: int
    cum_loss: float
    trigger_regret: float
    external_regret: float
    regret_over_sqrt_t: float
    residual: float

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class JointRow:
    """Self-play metrics; gaps are in normalized loss units."""

    t: int
    regret_gap: float
    nfcce_gap: float
    value_0: float
    value_1: Optional[float] = None

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


class RunHistory:
    """Per-episode policies played and the true expected losses they faced.

    ``losses`` are always the environment's expected loss vectors, also in
    bandit runs where the learner only saw sampled trajectories.
    """

    def __init__(self, tree: GameTree, T: int, *, label: str = "") -> None:
        XA = tree.num_sequences
        self.tree = tree
        self.T = T
        self.label = label
        self.t = 0
        self.policies = np.zeros((T, XA))
        self.losses = np.zeros((T, XA))
        self.residuals = np.zeros(T)
        self.trajectories: List[Trajectory] = []
        self.rows: List[MetricRow] = []

    def record(
        self,
        policy: np.ndarray,
        loss: np.ndarray,
        *,
        residual: float = 0.0,
        trajectory: Optional[Trajectory] = None,
    ) -> None:
        if self.t >= self.T:
            raise IndexError(f"history already holds {self.T} episodes")
        self.policies[self.t] = policy
        self.losses[self.t] = loss
        self.residuals[self.t] = residual
        if trajectory is not None:
            self.trajectories.append(trajectory)
        self.t += 1

    def _upto(self, upto: Optional[int]) -> int:
        t = self.t if upto is None else upto
        if not 0 <= t <= self.t:
            raise ValueError(f"history has {self.t} episodes, asked for {t}")
        return t

    def cumulative_matrix(self, upto: Optional[int] = None) -> np.ndarray:
        """``sum_t l_t mu_t^T`` over the first ``upto`` episodes."""

        t = self._upto(upto)
        return self.losses[:t].T @ self.policies[:t]

    def cumulative_loss_vector(self, upto: Optional[int] = None) -> np.ndarray:
        return self.losses[: self._upto(upto)].sum(axis=0)

    def realized_loss(self, upto: Optional[int] = None) -> float:
        t = self._upto(upto)
        return float(np.einsum("ti,ti->", self.losses[:t], self.policies[:t]))

    def average_policy(self, upto: Optional[int] = None) -> np.ndarray:
        t = self._upto(upto)
        if t == 0:
            raise ValueError("no episodes recorded")
        return self.policies[:t].mean(axis=0)

    def max_residual(self, upto: Optional[int] = None) -> float:
        t = self._upto(upto)
        return float(self.residuals[:t].max(initial=0.0))

    def truncated(self, t: int, T: Optional[int] = None) -> "RunHistory":
        """Copy of the first ``t`` episodes with room for ``T`` (default: the original T)."""

        t = self._upto(t)
        out = RunHistory(self.tree, T or self.T, label=self.label)
        out.policies[:t] = self.policies[:t]
        out.losses[:t] = self.losses[:t]
        out.residuals[:t] = self.residuals[:t]
        out.trajectories = list(self.trajectories[:t])
        out.rows = [row for row in self.rows if row.t <= t]
        out.t = t
        return out

    def __repr__(self) -> str:
        return f"RunHistory({self.label or 'run'}, t={self.t}/{self.T}, XA={self.tree.num_sequences})"


@dataclass
class JointHistory:
    """Self-play run: one history per player plus the per-episode expected utilities."""

    players: Tuple[RunHistory, ...]
    utilities: np.ndarray
    rows: List[JointRow] = field(default_factory=list)
    efce_gap: Optional[float] = None
    nash_gap: Optional[float] = None

    @property
    def t(self) -> int:
        return self.players[0].t

    def product_policies(self, upto: Optional[int] = None) -> List[Tuple[np.ndarray, ...]]:
        t = self.t if upto is None else upto
        return [tuple(h.policies[s] for h in self.players) for s in range(t)]


def regret_over_sqrt(regret: float, t: int) -> float:
    return regret / math.sqrt(t) if t > 0 else 0.0


__all__ = ["MetricRow", "JointRow", "RunHistory", "JointHistory", "regret_over_sqrt"]
