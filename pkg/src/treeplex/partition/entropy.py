"""Dilated entropy and KL regularizers (as negative entropies, so they are convex).

``dilated_entropy(mu) = sum_s mu(s) log mu(a | x)`` over the sequences s = (x, a)
of the (sub)tree, with 0 log 0 = 0. The trigger versions add the entropy of
lambda and weight each trigger's subtree term by lambda_j; the balanced
versions scale the lambda term by XA and each inner infoset term by 1 / w[x, j].
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.special import xlogy

from ..errors import PolicyError
from ..games.policy import seq_to_behavioral
from ..games.tree import GameTree
from ..triggers.profile import TriggerProfile


def _seq_terms(tree: GameTree, mu: np.ndarray) -> np.ndarray:
    beh = seq_to_behavioral(tree, np.clip(mu, 0.0, None)).reshape(-1)
    return xlogy(np.clip(mu, 0.0, None), beh)


def _seq_kl_terms(tree: GameTree, mu: np.ndarray, nu: np.ndarray) -> np.ndarray:
    mu = np.clip(mu, 0.0, None)
    beh_mu = seq_to_behavioral(tree, mu).reshape(-1)
    beh_nu = seq_to_behavioral(tree, np.clip(nu, 0.0, None)).reshape(-1)
    if np.any((mu > 0.0) & (beh_nu <= 0.0)):
        raise PolicyError("reference policy vanishes where the policy has mass")
    out = np.zeros_like(mu)
    mask = mu > 0.0
    out[mask] = mu[mask] * np.log(beh_mu[mask] / beh_nu[mask])
    return out


def dilated_entropy(tree: GameTree, mu: np.ndarray, root: Optional[int] = None) -> float:
    terms = _seq_terms(tree, mu)
    if root is not None:
        terms = terms.reshape(tree.num_infosets, -1)[list(tree.subtrees[root])]
    return float(terms.sum())


def dilated_kl(tree: GameTree, mu: np.ndarray, nu: np.ndarray, root: Optional[int] = None) -> float:
    terms = _seq_kl_terms(tree, mu, nu)
    if root is not None:
        terms = terms.reshape(tree.num_infosets, -1)[list(tree.subtrees[root])]
    return float(terms.sum())


def _lambda_entropy(lam: np.ndarray) -> float:
    return float(xlogy(lam, lam).sum())


def _lambda_kl(lam: np.ndarray, ref: np.ndarray) -> float:
    mask = lam > 0.0
    if np.any(ref[mask] <= 0.0):
        raise PolicyError("reference lambda vanishes where lambda has mass")
    return float((lam[mask] * np.log(lam[mask] / ref[mask])).sum())


def _column_weights(tree: GameTree, weights: Optional[np.ndarray]) -> np.ndarray:
    """(XA, XA) multiplier for the per-sequence terms of every trigger column."""

    if weights is None:
        return np.ones((tree.num_sequences, tree.num_sequences))
    return np.repeat(1.0 / weights, tree.num_actions, axis=0)


def trigger_dilated_entropy(
    tree: GameTree,
    profile: TriggerProfile,
    weights: Optional[np.ndarray] = None,
    outer_scale: float = 1.0,
) -> float:
    scale = _column_weights(tree, weights)
    inner = np.array([_seq_terms(tree, profile.m[:, j]) for j in range(tree.num_sequences)]).T
    per_trigger = (inner * scale).sum(axis=0)
    return outer_scale * _lambda_entropy(profile.lam) + float(profile.lam @ per_trigger)


def trigger_dilated_kl(
    tree: GameTree,
    profile: TriggerProfile,
    reference: TriggerProfile,
    weights: Optional[np.ndarray] = None,
    outer_scale: float = 1.0,
) -> float:
    scale = _column_weights(tree, weights)
    inner = np.array(
        [_seq_kl_terms(tree, profile.m[:, j], reference.m[:, j]) for j in range(tree.num_sequences)]
    ).T
    per_trigger = (inner * scale).sum(axis=0)
    return outer_scale * _lambda_kl(profile.lam, reference.lam) + float(profile.lam @ per_trigger)


def balanced_trigger_entropy(tree: GameTree, profile: TriggerProfile, weights: np.ndarray) -> float:
    return trigger_dilated_entropy(tree, profile, weights, float(tree.num_sequences))


def balanced_trigger_kl(
    tree: GameTree, profile: TriggerProfile, reference: TriggerProfile, weights: np.ndarray
) -> float:
    return trigger_dilated_kl(tree, profile, reference, weights, float(tree.num_sequences))


__all__ = [
    "dilated_entropy",
    "dilated_kl",
    "trigger_dilated_entropy",
    "trigger_dilated_kl",
    "balanced_trigger_entropy",
    "balanced_trigger_kl",
]
