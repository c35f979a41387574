from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, List, Mapping, NamedTuple, Tuple

import numpy as np

from ..errors import GameSpecError
from .tree import GameTree

ROW_TOLERANCE = 1e-12


class RewardKind(str, Enum):
    BERNOULLI = "bernoulli"
    EXACT = "exact"


@dataclass(frozen=True, eq=False)
class EpisodeEnvironment:
    """One episode's adversarial choices: initial distribution, transitions, mean rewards.

    ``initial`` has length X (zero off layer 1), ``transition`` is (XA, X) with
    each row supported on that sequence's children, ``mean_reward`` has length XA.
    """

    tree: GameTree
    initial: np.ndarray
    transition: np.ndarray
    mean_reward: np.ndarray
    reward_kind: RewardKind = RewardKind.BERNOULLI
    unreachable: Tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        tree = self.tree
        X, XA = tree.num_infosets, tree.num_sequences
        initial = np.asarray(self.initial, dtype=float)
        transition = np.asarray(self.transition, dtype=float)
        reward = np.asarray(self.mean_reward, dtype=float)
        if initial.shape != (X,) or transition.shape != (XA, X) or reward.shape != (XA,):
            raise GameSpecError("environment arrays do not match the tree dimensions")
        roots = np.zeros(X, dtype=bool)
        roots[list(tree.roots)] = True
        if initial.min() < 0 or np.abs(initial[~roots]).max(initial=0.0) > 0:
            raise GameSpecError("initial distribution must be supported on layer 1")
        if abs(initial.sum() - 1.0) > ROW_TOLERANCE:
            raise GameSpecError(f"initial distribution sums to {initial.sum():.15f}")
        if transition.min() < 0:
            raise GameSpecError("transition probabilities must be nonnegative")
        for j, kids in enumerate(tree.seq_children):
            row = transition[j]
            support = np.zeros(X, dtype=bool)
            support[list(kids)] = True
            if np.abs(row[~support]).max(initial=0.0) > 0:
                raise GameSpecError(f"transition from {tree.label(j)} leaves its child set")
            if kids and abs(row.sum() - 1.0) > ROW_TOLERANCE:
                raise GameSpecError(f"transition from {tree.label(j)} sums to {row.sum():.15f}")
        if reward.min() < 0.0 or reward.max() > 1.0:
            raise GameSpecError("mean rewards must lie in [0, 1]")
        for name, arr in (("initial", initial), ("transition", transition), ("mean_reward", reward)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def infoset_reach(self) -> np.ndarray:
        """p(x_h): probability the environment leads to x_h when the player follows its history."""

        reach = np.array(self.initial, dtype=float)
        A = self.tree.num_actions
        for x in range(self.tree.roots.stop, self.tree.num_infosets):
            p = int(self.tree.parent_seq[x])
            reach[x] = reach[p // A] * self.transition[p, x]
        return reach

    def sample_reward(self, seq: int, rng: np.random.Generator) -> float:
        mean = float(self.mean_reward[seq])
        if self.reward_kind is RewardKind.EXACT:
            return mean
        return float(rng.random() < mean)


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw of one index; a single uniform per call keeps streams reproducible."""

    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(idx, len(cdf) - 1)


class Step(NamedTuple):
    infoset: int
    action: int
    reward: float


@dataclass(frozen=True)
class Trajectory:
    steps: Tuple[Step, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def sequences(self, tree: GameTree) -> List[int]:
        return [tree.seq(s.infoset, s.action) for s in self.steps]

    def check(self, tree: GameTree) -> None:
        for h, step in enumerate(self.steps, start=1):
            if tree.layer_of[step.infoset] != h:
                raise ValueError(f"step {h} visits '{tree.infoset_ids[step.infoset]}' outside layer {h}")
            if h > 1:
                prev = self.steps[h - 2]
                if step.infoset not in tree.children(prev.infoset, prev.action):
                    raise ValueError(f"step {h} does not follow the previous sequence")


# builders -----------------------------------------------------------------------


def uniform_environment(tree: GameTree, reward: float | np.ndarray = 0.0, kind: RewardKind = RewardKind.BERNOULLI) -> EpisodeEnvironment:
    X, XA = tree.num_infosets, tree.num_sequences
    initial = np.zeros(X)
    initial[list(tree.roots)] = 1.0 / len(tree.roots)
    transition = np.zeros((XA, X))
    for j, kids in enumerate(tree.seq_children):
        if kids:
            transition[j, list(kids)] = 1.0 / len(kids)
    mean = np.broadcast_to(np.asarray(reward, dtype=float), (XA,)).copy()
    return EpisodeEnvironment(tree, initial, transition, mean, kind)


def random_environment(
    tree: GameTree,
    rng: np.random.Generator,
    *,
    deterministic: bool = False,
    kind: RewardKind = RewardKind.BERNOULLI,
) -> EpisodeEnvironment:
    """Dirichlet transitions and uniform mean rewards; ``deterministic`` picks one child each time."""

    X, XA = tree.num_infosets, tree.num_sequences
    roots = list(tree.roots)
    initial = np.zeros(X)
    transition = np.zeros((XA, X))
    if deterministic:
        initial[roots[int(rng.integers(len(roots)))]] = 1.0
    else:
        initial[roots] = rng.dirichlet(np.ones(len(roots)))
    for j, kids in enumerate(tree.seq_children):
        if not kids:
            continue
        if deterministic:
            transition[j, kids[int(rng.integers(len(kids)))]] = 1.0
        else:
            transition[j, list(kids)] = rng.dirichlet(np.ones(len(kids)))
    mean = rng.random(XA)
    return EpisodeEnvironment(tree, _renormalize(initial), _renormalize_rows(transition), mean, kind)


def environment_from_spec(tree: GameTree, block: Mapping[str, Any]) -> EpisodeEnvironment:
    """Read ``{initial, transition, reward}`` keyed by infoset ids; missing parts default to uniform / zero."""

    base = uniform_environment(tree)
    initial = np.array(base.initial)
    transition = np.array(base.transition)
    reward = np.zeros(tree.num_sequences)
    if "initial" in block:
        initial[:] = 0.0
        for ident, p in block["initial"].items():
            initial[tree.index(ident)] = float(p)
    for key, dist in (block.get("transition") or {}).items():
        ident, _, action = str(key).rpartition(",")
        j = tree.seq(tree.index(ident.strip()), int(action))
        transition[j] = 0.0
        for child, p in dist.items():
            transition[j, tree.index(child)] = float(p)
    for key, mean in (block.get("reward") or {}).items():
        ident, _, action = str(key).rpartition(",")
        reward[tree.seq(tree.index(ident.strip()), int(action))] = float(mean)
    kind = RewardKind(block.get("reward_kind", RewardKind.BERNOULLI.value))
    return EpisodeEnvironment(tree, initial, transition, reward, kind)


def _renormalize(vec: np.ndarray) -> np.ndarray:
    total = vec.sum()
    return vec / total if total > 0 else vec


def _renormalize_rows(mat: np.ndarray) -> np.ndarray:
    sums = mat.sum(axis=1, keepdims=True)
    return np.where(sums > 0, mat / np.where(sums > 0, sums, 1.0), mat)


__all__ = [
    "EpisodeEnvironment",
    "RewardKind",
    "Step",
    "Trajectory",
    "uniform_environment",
    "random_environment",
    "environment_from_spec",
    "sample_index",
]
