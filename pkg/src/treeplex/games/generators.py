from __future__ import annotations

from typing import Dict, List, Tuple, Union

import numpy as np

from ..errors import GameSpecError
from .tree import GameTree

DEFAULT_SEQUENCE_CAP = 512

Branching = Union[int, Tuple[int, int]]


def random_tree(
    seed: int,
    layers: int,
    branching: Branching,
    num_actions: int,
    *,
    roots: int = 1,
    cap: int = DEFAULT_SEQUENCE_CAP,
) -> GameTree:
    """Grow a layered tree; every sequence gets ``branching`` children (or a count drawn from a range).

    A fixed ``branching`` of at least one yields a full tree, which the
    balanced identities require. A range whose lower end is 0 yields ragged trees.
    """

    if layers < 1 or roots < 1 or num_actions < 1:
        raise GameSpecError("layers, roots and num_actions must all be positive")
    lo, hi = (branching, branching) if isinstance(branching, int) else branching
    if lo < 0 or hi < lo:
        raise GameSpecError(f"invalid branching range {branching!r}")
    rng = np.random.default_rng(seed)
    levels: List[List[str]] = [[f"x1.{k}" for k in range(roots)]]
    children: Dict[Tuple[str, int], List[str]] = {}
    total = roots
    for h in range(2, layers + 1):
        nxt: List[str] = []
        for parent in levels[-1]:
            for a in range(num_actions):
                count = int(rng.integers(lo, hi + 1)) if hi > lo else lo
                kids = [f"x{h}.{len(nxt) + k}" for k in range(count)]
                nxt.extend(kids)
                if kids:
                    children[(parent, a)] = kids
        total += len(nxt)
        if total * num_actions > cap:
            raise GameSpecError(
                f"random tree would have more than {cap} sequences (cap); lower layers or branching"
            )
        if not nxt:
            break
        levels.append(nxt)
    return GameTree(horizon=len(levels), layers=levels, num_actions=num_actions, children=children)


def parse_generator(source: str) -> GameTree:
    """Parse ``gen:random:<seed>:<layers>:<branching>:<A>`` (branching may be ``lo-hi``)."""

    parts = source.split(":")
    if len(parts) != 6 or parts[:2] != ["gen", "random"]:
        raise GameSpecError(
            f"unsupported generator '{source}'; expected gen:random:<seed>:<layers>:<branching>:<A>"
        )
    seed, layers, branching, actions = parts[2:]
    if "-" in branching:
        lo, hi = branching.split("-", 1)
        spec: Branching = (int(lo), int(hi))
    else:
        spec = int(branching)
    return random_tree(int(seed), int(layers), spec, int(actions))


__all__ = ["random_tree", "parse_generator", "DEFAULT_SEQUENCE_CAP"]
