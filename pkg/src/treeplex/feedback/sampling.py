from __future__ import annotations

from typing import List

import numpy as np

from ..games.environment import EpisodeEnvironment, Step, Trajectory, sample_index
from ..games.policy import seq_to_behavioral


def episode_rng(seed: int, episode: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, episode, stream); replayable in any order."""

    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, episode, stream])))


def sample_trajectory(env: EpisodeEnvironment, policy: np.ndarray, rng: np.random.Generator) -> Trajectory:
    """Play one episode of ``policy`` (sequence form) in ``env``.

    Draw order per step is action, reward, transition. On ragged trees the
    episode ends at the first sequence without children.
    """

    tree = env.tree
    beh = seq_to_behavioral(tree, policy)
    x = sample_index(env.initial, rng)
    steps: List[Step] = []
    while True:
        a = sample_index(beh[x], rng)
        j = tree.seq(x, a)
        steps.append(Step(x, a, env.sample_reward(j, rng)))
        kids = tree.seq_children[j]
        if not kids:
            break
        x = kids[sample_index(env.transition[j, list(kids)], rng)]
    return Trajectory(tuple(steps))


__all__ = ["episode_rng", "sample_trajectory"]
