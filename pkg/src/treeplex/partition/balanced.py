from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from ..games.policy import BalancedPolicies, DescendantCounts, balanced_policies, descendant_counts
from ..games.tree import GameTree
from .trigger import TriggerGradient, weighted_log_partition


def balanced_weights(tree: GameTree, policies: Optional[BalancedPolicies] = None) -> np.ndarray:
    """Recursion weights ``w[x, j]``; entries with x above trigger j's layer are set to 1 (unused)."""

    policies = policies or balanced_policies(tree)
    w = policies.trigger_weights(tree)
    return np.where(w > 0.0, w, 1.0)


def log_partition_balanced(
    tree: GameTree,
    M: np.ndarray,
    policies: Optional[BalancedPolicies] = None,
    weights: Optional[np.ndarray] = None,
) -> TriggerGradient:
    """Balanced trigger log-partition: inner recursions scaled by the balanced
    exploration weights, outer log-sum-exp scaled by XA."""

    if weights is None:
        weights = balanced_weights(tree, policies)
    return weighted_log_partition(tree, M, weights, float(tree.num_sequences))


def balanced_value_at_zero(tree: GameTree, counts: Optional[DescendantCounts] = None) -> float:
    """Closed form of the balanced log-partition at M = 0 (valid on full trees).

    Each trigger at x contributes ``X_{>=x} A log A``, so the value is
    ``XA log sum_j exp(X_{>=x(j)} A log A / XA)``.
    """

    counts = counts or descendant_counts(tree)
    A, XA = tree.num_actions, tree.num_sequences
    per_infoset = counts.subtree_size.astype(float) * A * math.log(A)
    logits = np.repeat(per_infoset, A) / XA
    return float(XA * logsumexp(logits))


__all__ = ["balanced_weights", "log_partition_balanced", "balanced_value_at_zero"]
