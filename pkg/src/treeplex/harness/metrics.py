"""Exact regret and equilibrium-gap metrics.

Regrets are sums of expected losses in the reduced (normalized) units.
``nash_gap`` is reported in the game's own payoff units.
"""

from __future__ import annotations

from typing import Dict, Optional, Sequence

import numpy as np

from ..feedback.losses import expected_loss
from ..games.efg import ExtensiveGame, PlayerView, expected_utilities, reduce_efg
from ..triggers.best_response import best_vertex_response, trigger_regret_from_cumulative
from .history import JointHistory, MetricRow, RunHistory, regret_over_sqrt


def trigger_regret(history: RunHistory, upto: Optional[int] = None) -> float:
    """``max over trigger modifications phi of sum_t <mu_t - phi mu_t, l_t>`` (not clamped at 0)."""

    t = history.t if upto is None else upto
    if t == 0:
        return 0.0
    return trigger_regret_from_cumulative(history.tree, history.cumulative_matrix(t))


def external_regret(history: RunHistory, upto: Optional[int] = None) -> float:
    t = history.t if upto is None else upto
    if t == 0:
        return 0.0
    _, best = best_vertex_response(history.tree, history.cumulative_loss_vector(t))
    return history.realized_loss(t) - best


def metric_row(history: RunHistory, t: int) -> MetricRow:
    regret = trigger_regret(history, t)
    return MetricRow(
        t=t,
        cum_loss=history.realized_loss(t),
        trigger_regret=regret,
        external_regret=external_regret(history, t),
        regret_over_sqrt_t=regret_over_sqrt(regret, t),
        residual=history.max_residual(t),
    )


def reduced_loss(game: ExtensiveGame, views: Sequence[PlayerView], i: int, policies: Sequence[np.ndarray]) -> np.ndarray:
    """Expected loss vector of player i when every other player follows its entry in ``policies``."""

    opponents: Dict[str, np.ndarray] = {}
    for k, view in enumerate(views):
        if k != i:
            opponents.update(view.behavioral_map(policies[k]))
    return expected_loss(reduce_efg(game, i, opponents or None, view=views[i]))


def efce_gap(
    game: ExtensiveGame,
    views: Sequence[PlayerView],
    product_policies: Sequence[Sequence[np.ndarray]],
) -> float:
    """Largest gain any player can get from a trigger deviation against the
    uniform mixture of the given product policies, per episode.

    Each component's losses are recomputed from the game, so on a
    full-feedback self-play run this equals the largest trigger regret
    divided by T whenever that regret is nonnegative.
    """

    T = len(product_policies)
    if T == 0:
        return 0.0
    gaps = []
    for i, view in enumerate(views):
        XA = view.tree.num_sequences
        C = np.zeros((XA, XA))
        for policies in product_policies:
            C += np.outer(reduced_loss(game, views, i, policies), policies[i])
        gaps.append(trigger_regret_from_cumulative(view.tree, C) / T)
    return max(0.0, max(gaps))


def nfcce_gap(history: JointHistory, upto: Optional[int] = None) -> float:
    t = history.t if upto is None else upto
    if t == 0:
        return 0.0
    return max(external_regret(h, t) for h in history.players) / t


def regret_gap(history: JointHistory, upto: Optional[int] = None) -> float:
    t = history.t if upto is None else upto
    if t == 0:
        return 0.0
    return max(trigger_regret(h, t) for h in history.players) / t


def nash_gap(game: ExtensiveGame, views: Sequence[PlayerView], policies: Sequence[np.ndarray]) -> float:
    """Exploitability of a profile of sequence-form policies in payoff units."""

    behaviors = [view.behavioral_map(policy) for view, policy in zip(views, policies)]
    values = expected_utilities(game, behaviors)
    total = 0.0
    for i, view in enumerate(views):
        loss = reduced_loss(game, views, i, policies)
        _, best_loss = best_vertex_response(view.tree, loss)
        total += view.utility_from_loss(best_loss) - float(values[i])
    return total


__all__ = [
    "trigger_regret",
    "external_regret",
    "metric_row",
    "efce_gap",
    "nfcce_gap",
    "regret_gap",
    "nash_gap",
    "reduced_loss",
]
