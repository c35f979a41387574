"""Importance-weighted bandit loss estimators with implicit-exploration (IX) bonuses.

Only the sequences visited by the trajectory get nonzero estimates, one per
step. The adaptive family carries one estimate per trigger j whose
denominator adds ``gamma * (mu_star + mu[j] * m_j)`` to the visit probability.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..errors import EstimatorError
from ..games.environment import Trajectory
from ..games.policy import BalancedPolicies
from ..games.tree import GameTree
from ..triggers.profile import TriggerProfile


def balanced_reach(tree: GameTree, policies: BalancedPolicies) -> np.ndarray:
    """``mu_star[i]``: reach of sequence i under the balanced policy for i's own layer."""

    return policies.sequence[tree.seq_layer - 1, np.arange(tree.num_sequences)]


def _visits(tree: GameTree, traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    seqs = np.array(traj.sequences(tree), dtype=np.int64)
    losses = np.array([1.0 - s.reward for s in traj.steps])
    return seqs, losses


def ix_estimator(
    tree: GameTree,
    traj: Trajectory,
    policy: np.ndarray,
    gamma: float,
    bonus: Optional[np.ndarray] = None,
) -> np.ndarray:
    """``(1 - r) / (mu(s) + gamma * bonus(s))`` on visited sequences s, 0 elsewhere (bonus defaults to 1)."""

    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    seqs, losses = _visits(tree, traj)
    extra = 1.0 if bonus is None else bonus[seqs]
    denom = policy[seqs] + gamma * extra
    if np.any(denom <= 0.0):
        raise EstimatorError("visited sequence has zero probability under the sampling policy")
    out = np.zeros(tree.num_sequences)
    out[seqs] = losses / denom
    return out


def balanced_ix_estimator(
    tree: GameTree, traj: Trajectory, policy: np.ndarray, gamma: float, star: np.ndarray
) -> np.ndarray:
    """IX estimator whose bonus is the balanced exploration reach; dominates every adaptive member."""

    return ix_estimator(tree, traj, policy, gamma, bonus=star)


def adaptive_estimator(
    tree: GameTree,
    traj: Trajectory,
    policy: np.ndarray,
    profile: TriggerProfile,
    star: np.ndarray,
    gamma: float,
) -> np.ndarray:
    """Family of estimates as an (XA, XA) array; column j is the estimate used for trigger j."""

    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    seqs, losses = _visits(tree, traj)
    denom = policy[seqs][:, None] + gamma * (star[seqs][:, None] + policy[None, :] * profile.m[seqs])
    if np.any(denom <= 0.0):
        raise EstimatorError("visited sequence has zero probability under the sampling policy")
    family = np.zeros((tree.num_sequences, tree.num_sequences))
    family[seqs] = losses[:, None] / denom
    return family


def ix_expectation(loss: np.ndarray, policy: np.ndarray, gamma: float, bonus: Optional[np.ndarray] = None) -> np.ndarray:
    """Conditional mean of ``ix_estimator`` given the true expected loss."""

    extra = 1.0 if bonus is None else bonus
    denom = policy + gamma * extra
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(denom > 0.0, loss * policy / np.where(denom > 0.0, denom, 1.0), 0.0)


def adaptive_expectation(
    loss: np.ndarray, policy: np.ndarray, profile: TriggerProfile, star: np.ndarray, gamma: float
) -> np.ndarray:
    """Conditional mean of ``adaptive_estimator``; each column is a rescaling of the true loss."""

    denom = policy[:, None] + gamma * (star[:, None] + policy[None, :] * profile.m)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(denom > 0.0, policy[:, None] / np.where(denom > 0.0, denom, 1.0), 0.0)
    return loss[:, None] * ratio


__all__ = [
    "balanced_reach",
    "ix_estimator",
    "balanced_ix_estimator",
    "adaptive_estimator",
    "ix_expectation",
    "adaptive_expectation",
]
