"""Two-player zero-sum extensive-form games and their per-player tree-form reductions.

Each player sees a layered tree of its own infosets. When an (infoset, action)
pair can end the game and can also lead to a later decision, the terminal
outcomes are routed through a *pad* infoset so every trajectory ends on a
sequence without children. The normalized payoff is paid on that last
sequence; earlier sequences pay reward 1 (zero loss), so for any policy
``<mu, loss> = 1 - E[normalized payoff]``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import GameSpecError, PolicyError
from .environment import EpisodeEnvironment, Step, Trajectory, sample_index
from .policy import seq_to_behavioral
from .tree import GameTree

Seq = Optional[Tuple[str, int]]
START_PAD = "<start>|end"


class NodeKind(str, Enum):
    CHANCE = "chance"
    DECISION = "decision"
    TERMINAL = "terminal"


@dataclass(frozen=True)
class EfgNode:
    kind: NodeKind
    player: int = -1
    infoset: str = ""
    actions: Tuple[str, ...] = ()
    children: Tuple["EfgNode", ...] = ()
    probs: Tuple[float, ...] = ()
    payoff: float = 0.0

    def utility(self, player: int) -> float:
        """Payoff to ``player``; the stored payoff belongs to player 0."""

        return self.payoff if player == 0 else -self.payoff


def chance(branches: Sequence[Tuple[float, EfgNode]]) -> EfgNode:
    probs = tuple(float(p) for p, _ in branches)
    if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
        raise GameSpecError(f"chance probabilities {probs} are not a distribution")
    return EfgNode(NodeKind.CHANCE, children=tuple(n for _, n in branches), probs=probs)


def decision(player: int, infoset: str, branches: Sequence[Tuple[str, EfgNode]]) -> EfgNode:
    if not branches:
        raise GameSpecError(f"decision node at '{infoset}' has no actions")
    return EfgNode(
        NodeKind.DECISION,
        player=player,
        infoset=infoset,
        actions=tuple(a for a, _ in branches),
        children=tuple(n for _, n in branches),
    )


def terminal(payoff: float) -> EfgNode:
    return EfgNode(NodeKind.TERMINAL, payoff=float(payoff))


@dataclass(frozen=True)
class ExtensiveGame:
    root: EfgNode
    num_players: int = 2
    name: str = "efg"

    def __post_init__(self) -> None:
        if self.num_players not in (1, 2):
            raise GameSpecError("only one- and two-player zero-sum games are supported")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExtensiveGame":
        return cls(
            root=_node_from_dict(data["root"]),
            num_players=int(data.get("players", 2)),
            name=str(data.get("name", "efg")),
        )


def _node_from_dict(data: Mapping[str, Any]) -> EfgNode:
    kind = NodeKind(data.get("kind", ""))
    if kind is NodeKind.TERMINAL:
        return terminal(float(data.get("payoff", 0.0)))
    if kind is NodeKind.CHANCE:
        return chance([(float(o["prob"]), _node_from_dict(o["node"])) for o in data["outcomes"]])
    return decision(
        int(data["player"]),
        str(data["infoset"]),
        [(str(a["name"]), _node_from_dict(a["node"])) for a in data["actions"]],
    )


# player views --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PlayerView:
    player: int
    tree: GameTree
    action_names: Dict[str, Tuple[str, ...]]
    pad_of: Dict[Seq, str]
    pad_source: Dict[str, Seq]
    payoff_range: Tuple[float, float]
    decision_infosets: Tuple[str, ...] = field(default=())

    def normalize(self, utility: float) -> float:
        lo, hi = self.payoff_range
        if hi == lo:
            return 1.0
        return (utility - lo) / (hi - lo)

    def utility_from_loss(self, loss_value: float) -> float:
        lo, hi = self.payoff_range
        if hi == lo:
            return lo
        return lo + (hi - lo) * (1.0 - loss_value)

    def behavioral_map(self, values: np.ndarray) -> Dict[str, np.ndarray]:
        """Behavioral probabilities on the real (non-pad) infosets of a sequence-form vector."""

        beh = seq_to_behavioral(self.tree, values)
        return {label: beh[self.tree.index(label)] for label in self.decision_infosets}


def player_view(game: ExtensiveGame, player: int) -> PlayerView:
    parent: Dict[str, Seq] = {}
    names: Dict[str, Tuple[str, ...]] = {}
    order: List[str] = []
    terminal_seqs: List[Seq] = []
    payoffs: List[float] = []

    def visit(node: EfgNode, seq: Seq) -> None:
        if node.kind is NodeKind.TERMINAL:
            if seq not in terminal_seqs:
                terminal_seqs.append(seq)
            payoffs.append(node.utility(player))
            return
        if node.kind is NodeKind.DECISION and node.player == player:
            label = node.infoset
            if label in parent:
                if parent[label] != seq:
                    raise GameSpecError(f"infoset '{label}' is reached through different histories")
                if names[label] != node.actions:
                    raise GameSpecError(f"infoset '{label}' has inconsistent action sets")
            else:
                parent[label] = seq
                names[label] = node.actions
                order.append(label)
            for a, child in enumerate(node.children):
                visit(child, (label, a))
            return
        for child in node.children:
            visit(child, seq)

    visit(game.root, None)
    if not order:
        raise GameSpecError(f"player {player} never acts in '{game.name}'")
    widths = {len(v) for v in names.values()}
    if len(widths) != 1:
        raise GameSpecError(
            f"player {player} has infosets with {sorted(widths)} actions; pad the game to a uniform count"
        )
    A = widths.pop()

    depth: Dict[str, int] = {}
    for label in order:
        p = parent[label]
        depth[label] = 1 if p is None else depth[p[0]] + 1
    has_children = {parent[label] for label in order if parent[label] is not None}

    pad_of: Dict[Seq, str] = {}
    for seq in terminal_seqs:
        if seq is None:
            pad_of[None] = START_PAD
        elif seq in has_children:
            label, a = seq
            pad_of[seq] = f"{label}|{names[label][a]}|end"

    horizon = max(depth.values())
    layers: List[List[str]] = [[] for _ in range(horizon)]
    for label in order:
        layers[depth[label] - 1].append(label)
    children: Dict[Tuple[str, int], List[str]] = defaultdict(list)
    for label in order:
        if parent[label] is not None:
            children[parent[label]].append(label)
    pad_source: Dict[str, Seq] = {}
    for seq, pad in pad_of.items():
        pad_source[pad] = seq
        if seq is None:
            layers[0].append(pad)
        else:
            layers[depth[seq[0]]].append(pad)
            children[seq].append(pad)
        names[pad] = tuple(f"end{a}" for a in range(A))

    tree = GameTree(horizon=horizon, layers=layers, num_actions=A, children=children)
    return PlayerView(
        player=player,
        tree=tree,
        action_names=names,
        pad_of=pad_of,
        pad_source=pad_source,
        payoff_range=(min(payoffs), max(payoffs)),
        decision_infosets=tuple(order),
    )




def player_views(game: ExtensiveGame) -> Tuple[PlayerView, ...]:
    return tuple(player_view(game, i) for i in range(game.num_players))


# reduction -----------------------------------------------------------------------


def _opponent_probs(policies: Optional[Mapping[str, Sequence[float]]], node: EfgNode) -> np.ndarray:
    n = len(node.children)
    if policies is None:
        return np.full(n, 1.0 / n)
    if node.infoset not in policies:
        raise PolicyError(f"no opponent policy for infoset '{node.infoset}'")
    probs = np.asarray(policies[node.infoset], dtype=float)
    if probs.shape != (n,) or probs.min() < 0 or abs(probs.sum() - 1.0) > 1e-9:
        raise PolicyError(f"opponent policy at '{node.infoset}' is not a distribution over {n} actions")
    return probs


def reduce_efg(
    game: ExtensiveGame,
    player: int,
    opponent_policies: Optional[Mapping[str, Sequence[float]]] = None,
    view: Optional[PlayerView] = None,
) -> EpisodeEnvironment:
    """Fold chance and the opponent's (fixed) behavior into ``player``'s tree-form environment.

    Transition and reward entries are ratios of summed reach probabilities.
    Sequences whose infoset is unreachable under the opponent policy get
    uniform transitions and zero reward and are listed in ``unreachable``.
    ``opponent_policies=None`` means the opponent plays uniformly.
    """

    view = view or player_view(game, player)
    tree = view.tree
    X, A = tree.num_infosets, tree.num_actions
    mass = np.zeros(X)
    end_mass: Dict[Seq, float] = defaultdict(float)
    end_value: Dict[Seq, float] = defaultdict(float)

    def visit(node: EfgNode, seq: Seq, rho: float) -> None:
        if rho == 0.0:
            return
        if node.kind is NodeKind.TERMINAL:
            end_mass[seq] += rho
            end_value[seq] += rho * view.normalize(node.utility(player))
            return
        if node.kind is NodeKind.DECISION and node.player == player:
            mass[tree.index(node.infoset)] += rho
            for a, child in enumerate(node.children):
                visit(child, (node.infoset, a), rho)
            return
        if node.kind is NodeKind.DECISION:
            probs = _opponent_probs(opponent_policies, node)
        else:
            probs = np.asarray(node.probs)
        for p, child in zip(probs, node.children):
            visit(child, seq, rho * float(p))

    visit(game.root, None, 1.0)
    for seq, pad in view.pad_of.items():
        mass[tree.index(pad)] = end_mass.get(seq, 0.0)

    roots = list(tree.roots)
    initial = np.zeros(X)
    initial[roots] = mass[roots] / mass[roots].sum()

    transition = np.zeros((tree.num_sequences, X))
    reward = np.zeros(tree.num_sequences)
    unreachable: List[int] = []
    for x, label in enumerate(tree.infoset_ids):
        for a in range(A):
            j = x * A + a
            kids = list(tree.seq_children[j])
            if kids:
                flow = mass[kids]
                total = flow.sum()
                if total > 0.0:
                    transition[j, kids] = flow / total
                else:
                    transition[j, kids] = 1.0 / len(kids)
            if mass[x] <= 0.0:
                unreachable.append(j)
                continue
            if label in view.pad_source:
                source = view.pad_source[label]
                reward[j] = end_value[source] / end_mass[source]
            elif kids:
                reward[j] = 1.0
            else:
                reward[j] = end_value[(label, a)] / end_mass[(label, a)]
    return EpisodeEnvironment(
        tree,
        initial,
        transition,
        np.clip(reward, 0.0, 1.0),
        unreachable=tuple(unreachable),
    )


# direct play -------------------------------------------------------------------


def simulate_episode(
    game: ExtensiveGame,
    views: Sequence[PlayerView],
    behaviors: Sequence[np.ndarray],
    rng: np.random.Generator,
) -> List[Trajectory]:
    """Play one joint episode; each player observes only its own infosets and payoff."""

    n = game.num_players
    steps: List[List[List[float]]] = [[] for _ in range(n)]
    last: List[Seq] = [None] * n
    node = game.root
    while node.kind is not NodeKind.TERMINAL:
        if node.kind is NodeKind.CHANCE:
            k = sample_index(np.asarray(node.probs), rng)
        else:
            i = node.player
            x = views[i].tree.index(node.infoset)
            k = sample_index(behaviors[i][x], rng)
            steps[i].append([x, k, 1.0])
            last[i] = (node.infoset, k)
        node = node.children[k]
    out: List[Trajectory] = []
    for i in range(n):
        view = views[i]
        if last[i] in view.pad_of:
            pad = view.tree.index(view.pad_of[last[i]])
            steps[i].append([pad, sample_index(behaviors[i][pad], rng), 1.0])
        steps[i][-1][2] = view.normalize(node.utility(i))
        out.append(Trajectory(tuple(Step(int(x), int(a), float(r)) for x, a, r in steps[i])))
    return out


def expected_utilities(game: ExtensiveGame, policies: Sequence[Mapping[str, Sequence[float]]]) -> np.ndarray:
    """Exact expected payoff of every player under behavioral ``policies`` (one map per player)."""

    def value(node: EfgNode) -> float:
        if node.kind is NodeKind.TERMINAL:
            return node.payoff
        if node.kind is NodeKind.CHANCE:
            probs = node.probs
        else:
            probs = _opponent_probs(policies[node.player], node)
        return float(sum(p * value(c) for p, c in zip(probs, node.children) if p > 0.0))

    v0 = value(game.root)
    return np.array([v0, -v0][: game.num_players])


__all__ = [
    "NodeKind",
    "EfgNode",
    "ExtensiveGame",
    "chance",
    "decision",
    "terminal",
    "PlayerView",
    "player_view",
    "player_views",
    "reduce_efg",
    "simulate_episode",
    "expected_utilities",
    "START_PAD",
]
