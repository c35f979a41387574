from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import PolicyError
from ..games.policy import FLOW_TOLERANCE, flow_violation, uniform_policy
from ..games.tree import GameTree
from .vertices import TriggerVertex

SIMPLEX_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class TriggerProfile:
    """A convex combination of trigger modifications, parametrized as (lambda, m).

    ``lam[j]`` is the weight of trigger sequence j; column ``m[:, j]`` is the
    subtree policy rooted at j's infoset that replaces play once j fires.
    """

    lam: np.ndarray
    m: np.ndarray

    def validate(self, tree: GameTree, tol: float = FLOW_TOLERANCE) -> None:
        XA = tree.num_sequences
        if self.lam.shape != (XA,) or self.m.shape != (XA, XA):
            raise PolicyError(f"profile shapes {self.lam.shape}, {self.m.shape} do not match XA={XA}")
        if self.lam.min() < -SIMPLEX_TOLERANCE or abs(self.lam.sum() - 1.0) > SIMPLEX_TOLERANCE * XA:
            raise PolicyError(f"lambda is not a distribution (sum {self.lam.sum():.15f})")
        if self.m.min() < -tol:
            raise PolicyError("subtree policies have negative entries")
        A = tree.num_actions
        for j in range(XA):
            violation = flow_violation(tree, self.m[:, j], root=j // A)
            if violation > tol:
                raise PolicyError(f"subtree policy of trigger {tree.label(j)} violates flow by {violation:.3e}")

    def apply(self, tree: GameTree, v: np.ndarray) -> np.ndarray:
        return profile_apply(tree, self, v)

    def matrix(self, tree: GameTree) -> np.ndarray:
        return profile_matrix(tree, self)

    def inner(self, tree: GameTree, M: np.ndarray) -> float:
        return profile_inner(tree, self, M)


def untriggered_loss(tree: GameTree, M: np.ndarray) -> np.ndarray:
    """``U_j = <I - E_j, M>`` for every trigger j."""

    return untriggered_from_diagonal(tree, np.diag(M))


def untriggered_from_diagonal(tree: GameTree, diag: np.ndarray, support: Optional[np.ndarray] = None) -> np.ndarray:
    """``untriggered_loss`` from the diagonal alone; ``support`` lists the indices where it can be nonzero."""

    if support is None:
        return diag.sum() - tree.succeq.astype(float) @ diag
    return diag[support].sum() - tree.succeq[:, support].astype(float) @ diag[support]


def profile_apply(tree: GameTree, profile: TriggerProfile, v: np.ndarray) -> np.ndarray:
    keep = 1.0 - profile.lam @ tree.succeq
    return keep * v + profile.m @ (profile.lam * v)


def profile_matrix(tree: GameTree, profile: TriggerProfile) -> np.ndarray:
    keep = 1.0 - profile.lam @ tree.succeq
    return np.diag(keep) + profile.m * profile.lam[None, :]


def profile_inner(tree: GameTree, profile: TriggerProfile, M: np.ndarray) -> float:
    """``<phi(lambda, m), M>`` as ``sum_j lambda_j (U_j + <m_j, M[:, j]>)``."""

    per_trigger = untriggered_loss(tree, M) + np.einsum("ij,ij->j", profile.m, M)
    return float(profile.lam @ per_trigger)


def profile_from_vertices(
    tree: GameTree, vertices: Sequence[TriggerVertex], weights: np.ndarray
) -> TriggerProfile:
    """Aggregate a distribution over deterministic trigger modifications into (lambda, m)."""

    XA = tree.num_sequences
    weights = np.asarray(weights, dtype=float)
    lam = np.zeros(XA)
    m = np.zeros((XA, XA))
    for w, vertex in zip(weights, vertices):
        lam[vertex.trigger] += w
        m[:, vertex.trigger] += w * vertex.subtree_policy
    A = tree.num_actions
    for j in range(XA):
        if lam[j] > 0.0:
            m[:, j] /= lam[j]
        else:
            m[:, j] = uniform_policy(tree, j // A)
    return TriggerProfile(lam=lam, m=m)


__all__ = [
    "TriggerProfile",
    "untriggered_loss",
    "untriggered_from_diagonal",
    "profile_apply",
    "profile_matrix",
    "profile_inner",
    "profile_from_vertices",
]
