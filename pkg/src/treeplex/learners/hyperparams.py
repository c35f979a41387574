"""Default learning rates, IX parameters and the matching regret bounds."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..games.policy import DescendantCounts, descendant_counts
from ..games.tree import GameTree
from .base import Algorithm, Feedback

if TYPE_CHECKING:  # pragma: no cover
    from ..harness.config import RunConfig

DEFAULT_DELTA = 0.05
DEFAULT_ETA_CONSTANT = 2.0

BALANCED = frozenset({Algorithm.BALANCED_EFCE_OMD, Algorithm.BALANCED_EFCE_OMD_INC})
VERTEX = frozenset({Algorithm.VERTEX_MWU, Algorithm.DILATED_OMD, Algorithm.DILATED_OMD_INC})


class HyperParameters(BaseModel):
    model_config = ConfigDict(frozen=True)

    eta: float = Field(gt=0.0)
    gamma: float = Field(default=0.0, ge=0.0)
    iota: float = Field(default=0.0, ge=0.0)
    regret_bound: Optional[float] = None

    @classmethod
    def resolve(cls, tree: GameTree, config: "RunConfig") -> "HyperParameters":
        """Tuned defaults for ``config``, with explicit ``eta``/``gamma`` taking precedence."""

        defaults = tuned_defaults(
            tree,
            config.algorithm,
            config.feedback,
            config.T,
            delta=config.delta,
            eta_constant=config.eta_constant,
        )
        return defaults.model_copy(
            update={
                "eta": config.eta if config.eta is not None else defaults.eta,
                "gamma": config.gamma if config.gamma is not None else defaults.gamma,
            }
        )


def full_feedback_defaults(
    tree: GameTree, T: int, eta_constant: float = DEFAULT_ETA_CONSTANT, counts: Optional[DescendantCounts] = None
) -> HyperParameters:
    counts = counts or descendant_counts(tree)
    H, XA = tree.horizon, tree.num_sequences
    iota = math.log(max(XA, 2))
    l1 = counts.policy_l1
    return HyperParameters(
        eta=eta_constant * math.sqrt(l1 * iota / (H**2 * T)),
        iota=iota,
        regret_bound=2.0 * math.sqrt(H**2 * l1 * iota * T),
    )


def bandit_defaults(
    tree: GameTree, T: int, delta: float = DEFAULT_DELTA, counts: Optional[DescendantCounts] = None
) -> HyperParameters:
    counts = counts or descendant_counts(tree)
    H, XA, A = tree.horizon, tree.num_sequences, tree.num_actions
    iota = math.log(3 * XA / delta)
    l1 = counts.policy_l1
    return HyperParameters(
        eta=math.sqrt(l1 * math.log(max(A, 2)) / (H * XA * T)),
        gamma=math.sqrt(l1 * iota / (XA * T)),
        iota=iota,
    )


def balanced_defaults(tree: GameTree, T: int, delta: float = DEFAULT_DELTA) -> HyperParameters:
    H, XA = tree.horizon, tree.num_sequences
    iota = math.log(10 * XA / delta)
    return HyperParameters(
        eta=math.sqrt(XA * iota / (H**4 * T)),
        gamma=2.0 * math.sqrt(XA * iota / (H**2 * T)),
        iota=iota,
        regret_bound=200.0 * math.sqrt(XA * H**4 * T * iota),
    )


def vertex_defaults(tree: GameTree, T: int, counts: Optional[DescendantCounts] = None) -> HyperParameters:
    counts = counts or descendant_counts(tree)
    H = tree.horizon
    log_card = max(counts.log_num_policies, math.log(2))
    return HyperParameters(
        eta=math.sqrt(2.0 * log_card / (H**2 * T)),
        iota=log_card,
        regret_bound=H * math.sqrt(2.0 * T * log_card),
    )


def tuned_defaults(
    tree: GameTree,
    algorithm: Algorithm,
    feedback: Feedback,
    T: int,
    *,
    delta: float = DEFAULT_DELTA,
    eta_constant: float = DEFAULT_ETA_CONSTANT,
) -> HyperParameters:
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    counts = descendant_counts(tree)
    if algorithm in BALANCED:
        return balanced_defaults(tree, T, delta)
    if feedback is Feedback.BANDIT:
        return bandit_defaults(tree, T, delta, counts)
    if algorithm in VERTEX:
        return vertex_defaults(tree, T, counts)
    return full_feedback_defaults(tree, T, eta_constant, counts)


def phi_hedge_regret_bound(num_vertices: int, eta: float, second_moment: float) -> float:
    """``log|Phi| / eta + (eta / 2) * sum_t sum_phi p_phi <phi mu, l>^2``."""

    return math.log(num_vertices) / eta + 0.5 * eta * second_moment


__all__ = [
    "HyperParameters",
    "DEFAULT_DELTA",
    "DEFAULT_ETA_CONSTANT",
    "full_feedback_defaults",
    "bandit_defaults",
    "balanced_defaults",
    "vertex_defaults",
    "tuned_defaults",
    "phi_hedge_regret_bound",
]
