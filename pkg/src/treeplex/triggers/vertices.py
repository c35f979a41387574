"""Enumeration of deterministic policies and deterministic trigger modifications.

Only for oracle-scale games: both sets grow exponentially, so every
enumerator checks its exact cardinality against a cap before building.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..errors import EnumerationCapExceeded
from ..games.policy import DescendantCounts, descendant_counts
from ..games.tree import GameTree

DEFAULT_ENUMERATION_CAP = 20_000


@dataclass(frozen=True, eq=False)
class TriggerVertex:
    """Trigger sequence ``trigger`` paired with a deterministic subtree policy rooted at its infoset."""

    trigger: int
    subtree_policy: np.ndarray

    def infoset(self, tree: GameTree) -> int:
        return self.trigger // tree.num_actions

    def matrix(self, tree: GameTree) -> np.ndarray:
        return trigger_vertex_matrix(tree, self)


def count_subtree_policies(tree: GameTree, root: int, counts: Optional[DescendantCounts] = None) -> int:
    counts = counts or descendant_counts(tree)
    return int(round(math.exp(counts.log_policies[root])))


def count_policies(tree: GameTree, counts: Optional[DescendantCounts] = None) -> int:
    counts = counts or descendant_counts(tree)
    return int(round(math.exp(counts.log_num_policies)))


def count_trigger_vertices(tree: GameTree, counts: Optional[DescendantCounts] = None) -> int:
    counts = counts or descendant_counts(tree)
    return int(round(tree.num_actions * np.exp(counts.log_policies).sum()))


def _subtree_vertices(tree: GameTree, x: int) -> List[np.ndarray]:
    A = tree.num_actions
    out: List[np.ndarray] = []
    for a in range(A):
        head = np.zeros(tree.num_sequences)
        head[x * A + a] = 1.0
        partial = [head]
        for c in tree.children(x, a):
            below = _subtree_vertices(tree, c)
            partial = [p + s for p in partial for s in below]
        out.extend(partial)
    return out


def enumerate_subtree_policies(
    tree: GameTree, root: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> List[np.ndarray]:
    """All deterministic subtree policies rooted at infoset ``root`` (0/1 vectors of length XA)."""

    count = count_subtree_policies(tree, root)
    if count > cap:
        raise EnumerationCapExceeded(f"subtree policies at '{tree.infoset_ids[root]}'", count, cap)
    return _subtree_vertices(tree, root)


def enumerate_policies(tree: GameTree, cap: int = DEFAULT_ENUMERATION_CAP) -> List[np.ndarray]:
    """The vertex set of the policy polytope; choices at unreached infosets are zeroed, so no duplicates."""

    count = count_policies(tree)
    if count > cap:
        raise EnumerationCapExceeded("deterministic policies", count, cap)
    vertices = [np.zeros(tree.num_sequences)]
    for root in tree.roots:
        below = _subtree_vertices(tree, root)
        vertices = [v + s for v in vertices for s in below]
    return vertices


def enumerate_trigger_vertices(tree: GameTree, cap: int = DEFAULT_ENUMERATION_CAP) -> List[TriggerVertex]:
    """One vertex per (trigger sequence, deterministic subtree policy at the trigger's infoset).

    The empty-history trigger is not part of the set.
    """

    count = count_trigger_vertices(tree)
    if count > cap:
        raise EnumerationCapExceeded("deterministic trigger modifications", count, cap)
    A = tree.num_actions
    out: List[TriggerVertex] = []
    for x in range(tree.num_infosets):
        policies = _subtree_vertices(tree, x)
        for a in range(A):
            out.extend(TriggerVertex(x * A + a, m) for m in policies)
    return out


def apply_trigger_vertex(tree: GameTree, vertex: TriggerVertex, mu: np.ndarray) -> np.ndarray:
    """``(I - E_j) mu + m * mu[j]`` without materializing the matrix."""

    j = vertex.trigger
    out = np.array(mu, dtype=float)
    out[tree.succeq[j]] = 0.0
    out += vertex.subtree_policy * mu[j]
    return out


def trigger_vertex_matrix(tree: GameTree, vertex: TriggerVertex) -> np.ndarray:
    j = vertex.trigger
    mat = np.diag((~tree.succeq[j]).astype(float))
    mat[:, j] += vertex.subtree_policy
    return mat


__all__ = [
    "DEFAULT_ENUMERATION_CAP",
    "TriggerVertex",
    "count_policies",
    "count_subtree_policies",
    "count_trigger_vertices",
    "enumerate_policies",
    "enumerate_subtree_policies",
    "enumerate_trigger_vertices",
    "apply_trigger_vertex",
    "trigger_vertex_matrix",
]
