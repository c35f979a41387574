from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import logsumexp, softmax

from ..games.tree import GameTree
from ..triggers.profile import untriggered_loss
from ..triggers.vertices import TriggerVertex, trigger_vertex_matrix
from .trigger import check_finite


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Direct log-sum-exp over a vertex list; ``gradient`` is the softmax-weighted vertex average."""

    value: float
    gradient: np.ndarray
    weights: np.ndarray


def vertex_scores(
    tree: GameTree, vertices: Sequence[Union[TriggerVertex, np.ndarray]], loss: np.ndarray
) -> np.ndarray:
    """``<v, loss>`` for every vertex; trigger vertices pair with an XA x XA loss matrix."""

    loss = check_finite(loss)
    if vertices and isinstance(vertices[0], TriggerVertex):
        untriggered = untriggered_loss(tree, loss)
        return np.array(
            [untriggered[v.trigger] + v.subtree_policy @ loss[:, v.trigger] for v in vertices]
        )
    return np.asarray(vertices, dtype=float) @ loss


def brute_force_log_partition(
    tree: GameTree, vertices: Sequence[Union[TriggerVertex, np.ndarray]], loss: np.ndarray
) -> OracleResult:
    if not vertices:
        raise ValueError("vertex list is empty")
    logits = -vertex_scores(tree, vertices, loss)
    weights = softmax(logits)
    if isinstance(vertices[0], TriggerVertex):
        gradient = np.zeros((tree.num_sequences, tree.num_sequences))
        for w, vertex in zip(weights, vertices):
            gradient += w * trigger_vertex_matrix(tree, vertex)
    else:
        gradient = weights @ np.asarray(vertices, dtype=float)
    return OracleResult(value=float(logsumexp(logits)), gradient=gradient, weights=weights)


__all__ = ["OracleResult", "vertex_scores", "brute_force_log_partition"]
