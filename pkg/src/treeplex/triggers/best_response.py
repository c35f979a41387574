from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..games.tree import GameTree
from .profile import untriggered_loss
from .vertices import TriggerVertex


@dataclass(frozen=True, eq=False)
class TriggerResponse:
    """Best deterministic trigger modification against a cumulative loss matrix.

    ``values[j]`` is the smallest total loss reachable by any modification
    triggered at j; ``value`` is their minimum, attained by ``vertex``.
    """

    vertex: TriggerVertex
    value: float
    values: np.ndarray


def _subtree_minima(tree: GameTree, losses: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Bottom-up ``V[x, k] = min_a (losses[(x, a), k] + sum_c V[c, k])`` for every column k.

    Returns the values (X, K) and the minimizing actions (X, K); the lowest
    action index wins ties.
    """

    A = tree.num_actions
    X = tree.num_infosets
    K = losses.shape[1]
    V = np.zeros((X, K))
    choice = np.zeros((X, K), dtype=np.int64)
    for x in reversed(range(X)):
        options = np.array(losses[x * A : (x + 1) * A], dtype=float)
        for a in range(A):
            for c in tree.children(x, a):
                options[a] += V[c]
        choice[x] = np.argmin(options, axis=0)
        V[x] = options[choice[x], np.arange(K)]
    return V, choice


def _deterministic_policy(tree: GameTree, choice: np.ndarray, roots: Tuple[int, ...]) -> np.ndarray:
    A = tree.num_actions
    out = np.zeros(tree.num_sequences)
    stack = list(roots)
    while stack:
        x = stack.pop()
        a = int(choice[x])
        out[x * A + a] = 1.0
        stack.extend(tree.children(x, a))
    return out


def trigger_response_values(tree: GameTree, cumulative: np.ndarray) -> np.ndarray:
    """Per-trigger optimal totals ``U_j(C) + min over subtree policies m of <m, C[:, j]>``."""

    V, _ = _subtree_minima(tree, cumulative)
    A = tree.num_actions
    owners = np.arange(tree.num_sequences) // A
    return untriggered_loss(tree, cumulative) + V[owners, np.arange(tree.num_sequences)]


def best_trigger_response(tree: GameTree, cumulative: np.ndarray) -> TriggerResponse:
    """Exact minimum of ``sum_t <phi mu_t, l_t>`` over trigger modifications.

    ``cumulative`` is ``C = sum_t l_t mu_t^T``; column j carries the loss seen
    by the subtree policy once j fires and the diagonal yields the untriggered part.
    """

    V, choice = _subtree_minima(tree, cumulative)
    A = tree.num_actions
    seqs = np.arange(tree.num_sequences)
    values = untriggered_loss(tree, cumulative) + V[seqs // A, seqs]
    j = int(np.argmin(values))
    policy = _deterministic_policy(tree, choice[:, j], (j // A,))
    return TriggerResponse(TriggerVertex(j, policy), float(values[j]), values)


def trigger_regret_from_cumulative(tree: GameTree, cumulative: np.ndarray) -> float:
    """``sum_t <mu_t, l_t> - min_phi sum_t <phi mu_t, l_t>``; the trace of C is the realized loss."""

    return float(np.trace(cumulative) - trigger_response_values(tree, cumulative).min())


def best_vertex_response(tree: GameTree, loss: np.ndarray) -> Tuple[np.ndarray, float]:
    """Deterministic policy minimizing ``<v, loss>`` and its value."""

    V, choice = _subtree_minima(tree, np.asarray(loss, dtype=float)[:, None])
    roots = tuple(tree.roots)
    policy = _deterministic_policy(tree, choice[:, 0], roots)
    return policy, float(V[list(roots), 0].sum())


__all__ = [
    "TriggerResponse",
    "trigger_response_values",
    "best_trigger_response",
    "trigger_regret_from_cumulative",
    "best_vertex_response",
]
