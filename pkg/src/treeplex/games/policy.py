from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from ..errors import PolicyError
from .tree import GameTree

FLOW_TOLERANCE = 1e-10

Behavioral = np.ndarray  # shape (X, A), rows on the simplex


@dataclass(frozen=True)
class SequencePolicy:
    """A sequence-form vector; ``root`` set means a subtree policy rooted there."""

    values: np.ndarray
    root: Optional[int] = None

    def flow_violation(self, tree: GameTree) -> float:
        return flow_violation(tree, self.values, self.root)

    def validate(self, tree: GameTree, tol: float = FLOW_TOLERANCE) -> None:
        validate_sequence(tree, self.values, self.root, tol)


def flow_violation(tree: GameTree, values: np.ndarray, root: Optional[int] = None) -> float:
    """Largest absolute violation of the flow constraints (and of the zero outside a subtree)."""

    A = tree.num_actions
    V = np.asarray(values, dtype=float).reshape(tree.num_infosets, A)
    sums = V.sum(axis=1)
    parent = np.where(tree.parent_seq >= 0, values[np.maximum(tree.parent_seq, 0)], 1.0)
    if root is None:
        return float(np.max(np.abs(sums - parent)))
    inside = tree.in_subtree[root]
    expected = np.where(np.arange(tree.num_infosets) == root, 1.0, parent)
    worst = np.max(np.abs(sums[inside] - expected[inside]))
    outside = np.abs(V[~inside]).max() if (~inside).any() else 0.0
    return float(max(worst, outside))


def validate_sequence(
    tree: GameTree, values: np.ndarray, root: Optional[int] = None, tol: float = FLOW_TOLERANCE
) -> None:
    values = np.asarray(values, dtype=float)
    if values.shape != (tree.num_sequences,):
        raise PolicyError(f"expected a vector of length {tree.num_sequences}, got shape {values.shape}")
    if np.isnan(values).any():
        raise PolicyError("policy contains NaN")
    if values.min(initial=0.0) < -tol:
        raise PolicyError(f"policy has a negative entry ({values.min():.3e})")
    violation = flow_violation(tree, values, root)
    if violation > tol:
        raise PolicyError(f"flow conservation violated by {violation:.3e}")


def seq_to_behavioral(tree: GameTree, values: Union[np.ndarray, SequencePolicy]) -> Behavioral:
    """Condition a sequence-form vector per infoset; zero-reach infosets get the uniform row."""

    if isinstance(values, SequencePolicy):
        values = values.values
    values = np.asarray(values, dtype=float)
    if values.min(initial=0.0) < 0.0:
        raise PolicyError(f"policy has a negative entry ({values.min():.3e})")
    V = values.reshape(tree.num_infosets, tree.num_actions)
    sums = V.sum(axis=1, keepdims=True)
    uniform = np.full_like(V, 1.0 / tree.num_actions)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(sums > 0.0, V / np.where(sums > 0.0, sums, 1.0), uniform)


def behavioral_to_seq(
    tree: GameTree,
    behavioral: Union[Behavioral, Mapping[str, Sequence[float]]],
    root: Optional[int] = None,
    tol: float = 1e-12,
) -> np.ndarray:
    """Multiply behavioral probabilities along each history (from ``root`` when given)."""

    beh = _as_behavioral(tree, behavioral)
    if beh.min() < -tol or np.abs(beh.sum(axis=1) - 1.0).max() > tol:
        raise PolicyError("behavioral distributions must lie on the simplex")
    A = tree.num_actions
    out = np.zeros(tree.num_sequences)
    members = range(tree.num_infosets) if root is None else tree.subtrees[root]
    for x in members:
        if x == root or (root is None and tree.layer_of[x] == 1):
            reach = 1.0
        else:
            reach = out[tree.parent_seq[x]]
        out[x * A : (x + 1) * A] = reach * beh[x]
    return out


def _as_behavioral(tree: GameTree, behavioral: Union[Behavioral, Mapping[str, Sequence[float]]]) -> Behavioral:
    if isinstance(behavioral, Mapping):
        beh = np.full((tree.num_infosets, tree.num_actions), 1.0 / tree.num_actions)
        for ident, dist in behavioral.items():
            beh[tree.index(ident)] = np.asarray(dist, dtype=float)
        return beh
    beh = np.asarray(behavioral, dtype=float)
    if beh.shape != (tree.num_infosets, tree.num_actions):
        raise PolicyError(
            f"behavioral table must have shape {(tree.num_infosets, tree.num_actions)}, got {beh.shape}"
        )
    return beh


def uniform_policy(tree: GameTree, root: Optional[int] = None) -> np.ndarray:
    beh = np.full((tree.num_infosets, tree.num_actions), 1.0 / tree.num_actions)
    return behavioral_to_seq(tree, beh, root)


def random_policy(tree: GameTree, rng: np.random.Generator, root: Optional[int] = None, alpha: float = 1.0) -> np.ndarray:
    beh = rng.dirichlet(np.full(tree.num_actions, alpha), size=tree.num_infosets)
    return behavioral_to_seq(tree, beh, root, tol=1e-9)


def behavioral_dict(tree: GameTree, behavioral: Behavioral) -> Dict[str, list[float]]:
    return {ident: [float(p) for p in behavioral[x]] for x, ident in enumerate(tree.infoset_ids)}


# descendant bookkeeping ---------------------------------------------------------


@dataclass(frozen=True)
class DescendantCounts:
    """Per-layer descendant counts and the policy-polytope size measures.

    ``infoset_layer[x, h]`` is |C_h(x)| (with h 1-based, column 0 unused) and
    ``sequence_layer[j, h]`` is |C_h(x, a)|.
    """

    infoset_layer: np.ndarray
    sequence_layer: np.ndarray
    subtree_size: np.ndarray
    reach_norm: np.ndarray
    log_policies: np.ndarray
    policy_l1: int
    log_num_policies: float


def descendant_counts(tree: GameTree) -> DescendantCounts:
    X, A, H = tree.num_infosets, tree.num_actions, tree.horizon
    infoset_layer = np.zeros((X, H + 1), dtype=np.int64)
    sequence_layer = np.zeros((X * A, H + 1), dtype=np.int64)
    reach_norm = np.zeros(X, dtype=np.int64)
    log_policies = np.zeros(X)
    for x in reversed(range(X)):
        infoset_layer[x, tree.layer_of[x]] = 1
        best = 0
        branch_logs = np.zeros(A)
        for a in range(A):
            j = x * A + a
            kids = tree.seq_children[j]
            for c in kids:
                sequence_layer[j] += infoset_layer[c]
            best = max(best, int(sum(reach_norm[c] for c in kids)))
            branch_logs[a] = float(sum(log_policies[c] for c in kids))
            infoset_layer[x] += sequence_layer[j]
        reach_norm[x] = 1 + best
        log_policies[x] = float(logsumexp(branch_logs))
    roots = list(tree.roots)
    return DescendantCounts(
        infoset_layer=infoset_layer,
        sequence_layer=sequence_layer,
        subtree_size=infoset_layer.sum(axis=1),
        reach_norm=reach_norm,
        log_policies=log_policies,
        policy_l1=int(reach_norm[roots].sum()),
        log_num_policies=float(log_policies[roots].sum()),
    )


# balanced exploration ------------------------------------------------------------


def balanced_behavioral(tree: GameTree, target_layer: int, counts: Optional[DescendantCounts] = None) -> Behavioral:
    """Play proportionally to layer-``target_layer`` descendants above it, uniformly from it on."""

    if not 1 <= target_layer <= tree.horizon:
        raise ValueError(f"target layer must be in 1..{tree.horizon}, got {target_layer}")
    counts = counts or descendant_counts(tree)
    X, A = tree.num_infosets, tree.num_actions
    beh = np.full((X, A), 1.0 / A)
    for x in range(X):
        if tree.layer_of[x] >= target_layer:
            continue
        below = counts.sequence_layer[x * A : (x + 1) * A, target_layer].astype(float)
        total = below.sum()
        if total > 0:
            beh[x] = below / total
    return beh


def balanced_policy(tree: GameTree, target_layer: int, counts: Optional[DescendantCounts] = None) -> np.ndarray:
    return behavioral_to_seq(tree, balanced_behavioral(tree, target_layer, counts))


@dataclass(frozen=True)
class BalancedPolicies:
    """All layers' balanced exploration policies plus the per-trigger recursion weights.

    ``sequence[h - 1]`` is mu^{*,h} in sequence form. ``weight[x, g]`` is
    mu^{*,h}_{g:h}(x, .) for x at layer h and its ancestor layer g <= h
    (zero for g > h); it does not depend on the action at x.
    """

    sequence: np.ndarray
    weight: np.ndarray

    def trigger_weights(self, tree: GameTree) -> np.ndarray:
        """``w[x, j]`` for trigger j, meaningful where x lies below infoset(j)."""

        trigger_layers = tree.seq_layer
        return self.weight[:, trigger_layers]


def balanced_policies(tree: GameTree, counts: Optional[DescendantCounts] = None) -> BalancedPolicies:
    counts = counts or descendant_counts(tree)
    X, A, H = tree.num_infosets, tree.num_actions, tree.horizon
    seqs = np.vstack([balanced_policy(tree, h, counts) for h in range(1, H + 1)])
    weight = np.zeros((X, H + 1))
    for x in range(X):
        h = int(tree.layer_of[x])
        row = seqs[h - 1, x * A : (x + 1) * A]
        if not np.allclose(row, row[0], rtol=1e-12, atol=0.0):
            raise AssertionError(f"balanced weight at '{tree.infoset_ids[x]}' varies with the action")
        path = tree.ancestor_seqs[x]
        for g in range(1, h + 1):
            denom = 1.0 if g == 1 else seqs[h - 1, path[g - 2]]
            weight[x, g] = row[0] / denom
    return BalancedPolicies(sequence=seqs, weight=weight)


__all__ = [
    "SequencePolicy",
    "Behavioral",
    "FLOW_TOLERANCE",
    "flow_violation",
    "validate_sequence",
    "seq_to_behavioral",
    "behavioral_to_seq",
    "uniform_policy",
    "random_policy",
    "behavioral_dict",
    "DescendantCounts",
    "descendant_counts",
    "balanced_behavioral",
    "balanced_policy",
    "BalancedPolicies",
    "balanced_policies",
]
