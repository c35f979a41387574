"""Tree-form decision problems: layered infosets joined by (infoset, action) sequences.

Infosets are stored densely, layer by layer, so every child has a larger index
than its parent. Sequence (x, a) lives at index ``x * A + a``.
"""

from __future__ import annotations

from functools import cached_property
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import GameSpecError

ChildMap = Mapping[Tuple[str, int], Sequence[str]]


class GameTree:
    def __init__(
        self,
        *,
        horizon: int,
        layers: Sequence[Sequence[str]],
        num_actions: int,
        children: ChildMap,
    ) -> None:
        if horizon < 1:
            raise GameSpecError(f"horizon must be positive, got {horizon}")
        if len(layers) != horizon:
            raise GameSpecError(f"horizon is {horizon} but {len(layers)} layers were listed")
        if num_actions < 1:
            raise GameSpecError(f"num_actions must be positive, got {num_actions}")

        ids: List[str] = []
        layer_of: List[int] = []
        for h, layer in enumerate(layers, start=1):
            if not layer:
                raise GameSpecError(f"layer {h} is empty")
            for ident in layer:
                ids.append(str(ident))
                layer_of.append(h)
        index: Dict[str, int] = {}
        for pos, ident in enumerate(ids):
            if ident in index:
                raise GameSpecError(f"infoset '{ident}' is listed more than once")
            index[ident] = pos

        A = num_actions
        X = len(ids)
        parent_seq = np.full(X, -1, dtype=np.int64)
        seq_children: List[List[int]] = [[] for _ in range(X * A)]
        for (parent, action), kids in children.items():
            if parent not in index:
                raise GameSpecError(f"children listed for unknown infoset '{parent}'")
            if not 0 <= int(action) < A:
                raise GameSpecError(f"action {action} at '{parent}' is outside 0..{A - 1}")
            p = index[parent]
            seq = p * A + int(action)
            for kid in kids:
                if kid not in index:
                    raise GameSpecError(f"dangling child '{kid}' under ('{parent}', {action})")
                c = index[kid]
                if layer_of[c] <= layer_of[p]:
                    raise GameSpecError(
                        f"cyclic structure: '{kid}' (layer {layer_of[c]}) cannot follow "
                        f"'{parent}' (layer {layer_of[p]})"
                    )
                if layer_of[c] != layer_of[p] + 1:
                    raise GameSpecError(f"child '{kid}' skips layers below '{parent}'")
                if parent_seq[c] >= 0:
                    prev = int(parent_seq[c])
                    raise GameSpecError(
                        f"child sets do not partition layer {layer_of[c]}: '{kid}' is listed under "
                        f"('{ids[prev // A]}', {prev % A}) and ('{parent}', {action})"
                    )
                parent_seq[c] = seq
                seq_children[seq].append(c)
        for pos in range(X):
            if layer_of[pos] > 1 and parent_seq[pos] < 0:
                raise GameSpecError(
                    f"child sets do not partition layer {layer_of[pos]}: '{ids[pos]}' has no parent"
                )

        self.horizon = int(horizon)
        self.num_actions = A
        self.infoset_ids: Tuple[str, ...] = tuple(ids)
        self._index = index
        self.layer_of = np.asarray(layer_of, dtype=np.int64)
        self.parent_seq = parent_seq
        self.seq_children: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(c)) for c in seq_children)
        bounds = np.searchsorted(self.layer_of, np.arange(1, horizon + 2))
        self.layer_slices: Tuple[slice, ...] = tuple(
            slice(int(bounds[h]), int(bounds[h + 1])) for h in range(horizon)
        )
        for arr in (self.layer_of, self.parent_seq):
            arr.setflags(write=False)

    # sizes -----------------------------------------------------------------
    @property
    def num_infosets(self) -> int:
        return len(self.infoset_ids)

    @property
    def num_sequences(self) -> int:
        return len(self.infoset_ids) * self.num_actions

    @property
    def layer_sizes(self) -> Tuple[int, ...]:
        return tuple(s.stop - s.start for s in self.layer_slices)

    @property
    def roots(self) -> range:
        s = self.layer_slices[0]
        return range(s.start, s.stop)

    # addressing ------------------------------------------------------------
    def index(self, infoset: str) -> int:
        try:
            return self._index[infoset]
        except KeyError:
            raise KeyError(f"Infoset '{infoset}' not found") from None

    def seq(self, infoset: int, action: int) -> int:
        return infoset * self.num_actions + action

    def seq_infoset(self, seq: int) -> int:
        return seq // self.num_actions

    def layer_infosets(self, h: int) -> range:
        s = self.layer_slices[h - 1]
        return range(s.start, s.stop)

    def children(self, infoset: int, action: int) -> Tuple[int, ...]:
        return self.seq_children[infoset * self.num_actions + action]

    def infoset_children(self, infoset: int) -> Tuple[int, ...]:
        A = self.num_actions
        out: List[int] = []
        for a in range(A):
            out.extend(self.seq_children[infoset * A + a])
        return tuple(out)

    def label(self, seq: int) -> str:
        return f"{self.infoset_ids[seq // self.num_actions]}:{seq % self.num_actions}"

    # structure -------------------------------------------------------------
    @cached_property
    def ancestor_seqs(self) -> Tuple[Tuple[int, ...], ...]:
        """Sequences on the path from the root down to (excluding) each infoset."""

        paths: List[Tuple[int, ...]] = []
        A = self.num_actions
        for x in range(self.num_infosets):
            p = int(self.parent_seq[x])
            paths.append(() if p < 0 else paths[p // A] + (p,))
        return tuple(paths)

    @cached_property
    def subtrees(self) -> Tuple[Tuple[int, ...], ...]:
        """Infosets of the subtree rooted at each infoset, in increasing (top-down) order."""

        members: List[List[int]] = [[x] for x in range(self.num_infosets)]
        for x in reversed(range(self.num_infosets)):
            for c in self.infoset_children(x):
                members[x].extend(members[c])
        return tuple(tuple(sorted(m)) for m in members)

    @cached_property
    def in_subtree(self) -> np.ndarray:
        """``in_subtree[g, x]`` is True iff infoset x is g or lies below g."""

        X = self.num_infosets
        mask = np.zeros((X, X), dtype=bool)
        for g, members in enumerate(self.subtrees):
            mask[g, list(members)] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def succeq(self) -> np.ndarray:
        """``succeq[j, i]`` is True iff sequence i is j or a descendant of j."""

        XA = self.num_sequences
        A = self.num_actions
        mask = np.zeros((XA, XA), dtype=bool)
        np.fill_diagonal(mask, True)
        for x, path in enumerate(self.ancestor_seqs):
            for j in path:
                mask[j, x * A : (x + 1) * A] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def seq_layer(self) -> np.ndarray:
        out = np.repeat(self.layer_of, self.num_actions)
        out.setflags(write=False)
        return out

    @cached_property
    def is_full(self) -> bool:
        """True when every sequence above the last layer has at least one child."""

        A = self.num_actions
        for j, kids in enumerate(self.seq_children):
            if not kids and self.layer_of[j // A] < self.horizon:
                return False
        return True

    def flow_matrix(self, root: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Linear flow constraints ``C @ mu == b`` of the (sub)tree polytope."""

        A = self.num_actions
        members: Iterable[int] = self.roots if root is None else self.subtrees[root]
        rows: List[np.ndarray] = []
        rhs: List[float] = []
        for x in members:
            row = np.zeros(self.num_sequences)
            row[x * A : (x + 1) * A] = 1.0
            is_top = (root is None and self.layer_of[x] == 1) or x == root
            if is_top:
                rhs.append(1.0)
            else:
                row[int(self.parent_seq[x])] = -1.0
                rhs.append(0.0)
            rows.append(row)
        if root is None:
            for x in range(self.roots.stop, self.num_infosets):
                row = np.zeros(self.num_sequences)
                row[x * A : (x + 1) * A] = 1.0
                row[int(self.parent_seq[x])] = -1.0
                rows.append(row)
                rhs.append(0.0)
        return np.vstack(rows), np.asarray(rhs)

    # serialization ---------------------------------------------------------
    def to_spec(self) -> Dict[str, Any]:
        layers = [[self.infoset_ids[x] for x in self.layer_infosets(h)] for h in range(1, self.horizon + 1)]
        children: Dict[str, List[str]] = {}
        A = self.num_actions
        for seq, kids in enumerate(self.seq_children):
            if kids:
                children[f"{self.infoset_ids[seq // A]},{seq % A}"] = [self.infoset_ids[c] for c in kids]
        return {
            "horizon": self.horizon,
            "layers": layers,
            "num_actions": A,
            "children": children,
        }

    def __repr__(self) -> str:
        return (
            f"GameTree(H={self.horizon}, X={self.num_infosets}, A={self.num_actions}, "
            f"layers={list(self.layer_sizes)})"
        )


def _parse_child_key(key: Any) -> Tuple[str, int]:
    if isinstance(key, tuple) and len(key) == 2:
        return str(key[0]), int(key[1])
    if isinstance(key, str) and "," in key:
        ident, _, action = key.rpartition(",")
        try:
            return ident.strip(), int(action)
        except ValueError:
            raise GameSpecError(f"children key '{key}' must end with an integer action") from None
    raise GameSpecError(f"children key {key!r} must look like 'infoset,action'")


def build_game(spec: Mapping[str, Any]) -> GameTree:
    """Validate a declarative spec ``{horizon, layers, num_actions, children}``."""

    missing = [k for k in ("layers", "num_actions") if k not in spec]
    if missing:
        raise GameSpecError(f"game spec is missing {', '.join(missing)}")
    layers = spec["layers"]
    horizon = int(spec.get("horizon", len(layers)))
    children: Dict[Tuple[str, int], Sequence[str]] = {}
    for key, kids in (spec.get("children") or {}).items():
        parsed = _parse_child_key(key)
        if parsed in children:
            raise GameSpecError(f"children listed twice for {parsed}")
        children[parsed] = [str(k) for k in kids]
    return GameTree(
        horizon=horizon,
        layers=[[str(x) for x in layer] for layer in layers],
        num_actions=int(spec["num_actions"]),
        children=children,
    )


__all__ = ["GameTree", "build_game"]
