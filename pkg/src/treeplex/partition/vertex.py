from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, softmax

from ..games.policy import behavioral_to_seq
from ..games.tree import GameTree
from .trigger import check_finite

KERNEL_LOG_THRESHOLD = 50.0


@dataclass(frozen=True, eq=False)
class VertexGradient:
    """``value = log sum_v exp(-<v, l>)``; ``policy = -grad`` in sequence form."""

    value: float
    policy: np.ndarray
    infoset_values: np.ndarray
    behavioral: np.ndarray


def vertex_recursion(tree: GameTree, loss: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``F_x = logsumexp_a(-l(x, a) + sum_c F_c)`` bottom-up, plus the per-infoset softmax."""

    A, X = tree.num_actions, tree.num_infosets
    F = np.zeros(X)
    beh = np.zeros((X, A))
    for x in reversed(range(X)):
        terms = -np.array(loss[x * A : (x + 1) * A], dtype=float)
        for a in range(A):
            terms[a] += sum(F[c] for c in tree.children(x, a))
        F[x] = logsumexp(terms)
        beh[x] = softmax(terms)
    return F, beh


def log_partition_vertex(tree: GameTree, loss: np.ndarray) -> VertexGradient:
    loss = check_finite(loss)
    F, beh = vertex_recursion(tree, loss)
    return VertexGradient(
        value=float(F[list(tree.roots)].sum()),
        policy=behavioral_to_seq(tree, beh, tol=1e-9),
        infoset_values=F,
        behavioral=beh,
    )


def log_kernel_eval(tree: GameTree, b: np.ndarray, infoset: int) -> float:
    """``log K_x(b, 1)`` via ``log K_x = logsumexp_a(log b(x, a) + sum_c log K_c)``."""

    b = np.asarray(b, dtype=float)
    if b.min() <= 0.0:
        raise ValueError("kernel weights must be strictly positive")
    return float(vertex_recursion(tree, -np.log(b))[0][infoset])


def kernel_eval(tree: GameTree, b: np.ndarray, infoset: int) -> float:
    """``K_x(b, 1) = sum over deterministic subtree policies v at x of prod_{v(s) = 1} b(s)``.

    Evaluated with the product recursion ``K_x = sum_a b(x, a) prod_c K_c``;
    switches to log space when any weight exceeds ``exp(KERNEL_LOG_THRESHOLD)``.
    """

    b = np.asarray(b, dtype=float)
    if b.min() <= 0.0:
        raise ValueError("kernel weights must be strictly positive")
    if np.log(b).max() > KERNEL_LOG_THRESHOLD:
        return float(np.exp(log_kernel_eval(tree, b, infoset)))
    A = tree.num_actions
    K = np.ones(tree.num_infosets)
    for x in reversed(tree.subtrees[infoset]):
        total = 0.0
        for a in range(A):
            prod = b[x * A + a]
            for c in tree.children(x, a):
                prod *= K[c]
            total += prod
        K[x] = total
    if not np.isfinite(K[infoset]):
        return float(np.exp(log_kernel_eval(tree, b, infoset)))
    return float(K[infoset])


__all__ = [
    "VertexGradient",
    "vertex_recursion",
    "log_partition_vertex",
    "kernel_eval",
    "log_kernel_eval",
    "KERNEL_LOG_THRESHOLD",
]
