"""Trigger log-partition functions and their gradients.

For every trigger j the inner recursion runs over the subtree of j's
infoset with loss column ``M[:, j]``:

    F[x, j] = (1 / w[x, j]) * logsumexp_a( w[x, j] * (-M[(x, a), j] + sum_c F[c, j]) )

and the outer aggregate is ``s * logsumexp_j((-U_j + F[x(j), j]) / s)``.
Unit weights with ``s = 1`` give the plain trigger function; balanced
exploration weights with ``s = XA`` give the balanced one. All triggers are
handled at once as columns of an (X, XA) table, so a full evaluation costs
O(X^2 A^2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp, softmax

from ..games.tree import GameTree
from ..triggers.profile import TriggerProfile, untriggered_loss


@dataclass(frozen=True, eq=False)
class TriggerGradient:
    """Value of a trigger log-partition function with ``-grad = phi(lam, m)``.

    ``inner[x, j]`` holds the per-trigger recursion values (only entries
    with x in the subtree of j's infoset are meaningful) and ``behavioral``
    the per-trigger conditional action probabilities, shape (X, A, XA).
    """

    value: float
    lam: np.ndarray
    m: np.ndarray
    inner: np.ndarray
    behavioral: np.ndarray

    @property
    def profile(self) -> TriggerProfile:
        return TriggerProfile(lam=self.lam, m=self.m)

    def root_values(self, tree: GameTree) -> np.ndarray:
        """``inner[x(j), j]`` for every trigger j."""

        seqs = np.arange(tree.num_sequences)
        return self.inner[seqs // tree.num_actions, seqs]


def check_finite(values: np.ndarray, what: str = "loss") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if np.isnan(arr).any():
        raise ValueError(f"{what} contains NaN")
    return arr


def inner_recursion(
    tree: GameTree, M: np.ndarray, weights: Optional[np.ndarray] = None
) -> tuple[np.ndarray, np.ndarray]:
    """Bottom-up per-trigger values ``F`` (X, XA) and conditionals (X, A, XA)."""

    A, X, XA = tree.num_actions, tree.num_infosets, tree.num_sequences
    F = np.zeros((X, XA))
    beh = np.zeros((X, A, XA))
    for x in reversed(range(X)):
        terms = -np.array(M[x * A : (x + 1) * A], dtype=float)
        for a in range(A):
            for c in tree.children(x, a):
                terms[a] += F[c]
        if weights is None:
            F[x] = logsumexp(terms, axis=0)
            beh[x] = softmax(terms, axis=0)
        else:
            scaled = terms * weights[x][None, :]
            F[x] = logsumexp(scaled, axis=0) / weights[x]
            beh[x] = softmax(scaled, axis=0)
    return F, beh


def sequence_form_columns(
    tree: GameTree, beh: np.ndarray, triggers: Optional[np.ndarray] = None
) -> np.ndarray:
    """Top-down: column k is the subtree policy rooted at the infoset of trigger ``triggers[k]``
    (all triggers by default) with conditionals ``beh[:, :, k]``."""

    A, X = tree.num_actions, tree.num_infosets
    if triggers is None:
        triggers = np.arange(tree.num_sequences)
    owners = np.asarray(triggers) // A
    K = len(owners)
    m = np.zeros((tree.num_sequences, K))
    for x in range(X):
        parent = int(tree.parent_seq[x])
        above = m[parent] if parent >= 0 else np.zeros(K)
        reach = np.where(owners == x, 1.0, above)
        m[x * A : (x + 1) * A] = beh[x] * reach[None, :]
    return m


def incremental_recursion(
    tree: GameTree,
    M: np.ndarray,
    log_beh: np.ndarray,
    weights: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """One-step increments of the per-trigger recursion for the columns in ``M`` (XA, K).

    ``F~[x, k] = (1 / w) logsumexp_a(log beh[x, a, k] + w * (-M[(x, a), k] + sum_c F~[c, k]))``;
    returns the increments (X, K) and the updated log conditionals (X, A, K).
    Summed over steps the increments telescope to the full recursion.
    """

    A, X = tree.num_actions, tree.num_infosets
    K = M.shape[1]
    F = np.zeros((X, K))
    new_log_beh = np.array(log_beh, dtype=float)
    for x in reversed(range(X)):
        terms = -np.array(M[x * A : (x + 1) * A], dtype=float)
        for a in range(A):
            for c in tree.children(x, a):
                terms[a] += F[c]
        w = np.ones(K) if weights is None else weights[x]
        shifted = log_beh[x] + terms * w[None, :]
        total = logsumexp(shifted, axis=0)
        F[x] = total / w
        new_log_beh[x] = shifted - total[None, :]
    return F, new_log_beh


def weighted_log_partition(
    tree: GameTree,
    M: np.ndarray,
    weights: Optional[np.ndarray] = None,
    outer_scale: float = 1.0,
) -> TriggerGradient:
    M = check_finite(M)
    F, beh = inner_recursion(tree, M, weights)
    seqs = np.arange(tree.num_sequences)
    logits = (-untriggered_loss(tree, M) + F[seqs // tree.num_actions, seqs]) / outer_scale
    value = float(outer_scale * logsumexp(logits))
    return TriggerGradient(
        value=value,
        lam=softmax(logits),
        m=sequence_form_columns(tree, beh),
        inner=F,
        behavioral=beh,
    )


def log_partition_trigger(tree: GameTree, M: np.ndarray) -> TriggerGradient:
    """``log sum over deterministic trigger modifications of exp(-<phi, M>)``."""

    return weighted_log_partition(tree, M)


__all__ = [
    "TriggerGradient",
    "check_finite",
    "inner_recursion",
    "sequence_form_columns",
    "incremental_recursion",
    "weighted_log_partition",
    "log_partition_trigger",
]
