from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..games.environment import EpisodeEnvironment


def expected_loss(env: EpisodeEnvironment) -> np.ndarray:
    """``l(x, a) = p(x) * (1 - mean_reward(x, a))`` where p(x) is the environment's reach of x."""

    reach = env.infoset_reach()
    return np.repeat(reach, env.tree.num_actions) * (1.0 - env.mean_reward)


@dataclass(frozen=True, eq=False)
class LossMatrix:
    """An XA x XA nonnegative matrix loss.

    Either rank one (``loss`` times ``policy`` transposed) or a set of
    explicit columns (``columns`` indices with ``values[:, k]`` for column
    ``columns[k]``). Materialize with ``dense()``.
    """

    size: int
    loss: Optional[np.ndarray] = None
    policy: Optional[np.ndarray] = None
    columns: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None

    @property
    def is_rank_one(self) -> bool:
        return self.loss is not None

    def nonzero_columns(self) -> np.ndarray:
        if self.is_rank_one:
            if not np.any(self.loss):
                return np.zeros(0, dtype=np.int64)
            return np.flatnonzero(self.policy)
        keep = np.any(self.values != 0.0, axis=0)
        return self.columns[keep]

    def column_block(self, cols: np.ndarray) -> np.ndarray:
        """Columns ``cols`` as an (XA, len(cols)) array; the full matrix is never built."""

        cols = np.asarray(cols, dtype=np.int64)
        if self.is_rank_one:
            return np.outer(self.loss, self.policy[cols])
        position = np.full(self.size, -1)
        position[self.columns] = np.arange(len(self.columns))
        block = np.zeros((self.size, len(cols)))
        found = position[cols] >= 0
        block[:, found] = self.values[:, position[cols][found]]
        return block

    def add_to(self, out: np.ndarray) -> None:
        """``out += M`` over the nonzero columns only."""

        cols = self.nonzero_columns()
        out[:, cols] += self.column_block(cols)

    def dense(self) -> np.ndarray:
        if self.is_rank_one:
            return np.outer(self.loss, self.policy)
        out = np.zeros((self.size, self.size))
        out[:, self.columns] = self.values
        return out

    def diagonal(self) -> np.ndarray:
        if self.is_rank_one:
            return self.loss * self.policy
        out = np.zeros(self.size)
        out[self.columns] = self.values[self.columns, np.arange(len(self.columns))]
        return out


def assemble_matrix(loss: np.ndarray, policy: np.ndarray) -> LossMatrix:
    """``M = l mu^T``."""

    loss = np.asarray(loss, dtype=float)
    policy = np.asarray(policy, dtype=float)
    if loss.shape != policy.shape or loss.ndim != 1:
        raise ValueError(f"loss {loss.shape} and policy {policy.shape} must be vectors of equal length")
    if loss.min(initial=0.0) < 0.0:
        raise ValueError("losses must be nonnegative")
    return LossMatrix(size=len(loss), loss=loss, policy=policy)


def assemble_adaptive_matrix(family: np.ndarray, policy: np.ndarray) -> LossMatrix:
    """Column j of the result is ``policy[j] * family[:, j]`` (family column j is trigger j's estimate)."""

    family = np.asarray(family, dtype=float)
    policy = np.asarray(policy, dtype=float)
    if family.shape != (len(policy), len(policy)):
        raise ValueError(f"estimator family has shape {family.shape}, expected {(len(policy), len(policy))}")
    if family.min(initial=0.0) < 0.0:
        raise ValueError("estimates must be nonnegative")
    columns = np.flatnonzero(policy > 0.0)
    return LossMatrix(size=len(policy), columns=columns, values=family[:, columns] * policy[columns][None, :])


__all__ = ["expected_loss", "LossMatrix", "assemble_matrix", "assemble_adaptive_matrix"]
