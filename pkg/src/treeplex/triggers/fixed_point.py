"""Fixed points ``phi mu = mu`` of trigger profiles.

The primary solver walks infosets top-down. At infoset x, with S the total
lambda on the sequences leading to x and ``acc`` the mass already routed into
x's sequences by triggers above it, the fixed-point rows restricted to x read

    (diag(S + lambda_x) - Q) mu_x = acc_x,    Q[a, b] = lambda_(x,b) m_(x,b)(a | x)

together with sum(mu_x) = mu(parent sequence). When S > 0 the matrix is a
nonsingular M-matrix, so the solution is unique and nonnegative; when S = 0
it is a stationary distribution of the local trigger chain.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy import linalg

from ..errors import FixedPointError
from ..games.policy import FLOW_TOLERANCE, flow_violation, uniform_policy
from ..games.tree import GameTree
from ..telemetry.base import Events, TelemetrySink, resolve_sink
from .profile import TriggerProfile, profile_apply, profile_matrix

FIXED_POINT_TOLERANCE = 1e-10
CESARO_STEPS = 50


def fixed_point_residual(tree: GameTree, profile: TriggerProfile, mu: np.ndarray) -> float:
    return float(np.max(np.abs(profile_apply(tree, profile, mu) - mu)))


def _structured_solve(tree: GameTree, profile: TriggerProfile) -> np.ndarray:
    A = tree.num_actions
    lam, m = profile.lam, profile.m
    mu = np.zeros(tree.num_sequences)
    acc = np.zeros(tree.num_sequences)
    ones = np.ones((1, A))
    for x in range(tree.num_infosets):
        block = slice(x * A, (x + 1) * A)
        path = tree.ancestor_seqs[x]
        above = float(lam[list(path)].sum()) if path else 0.0
        parent = int(tree.parent_seq[x])
        total = 1.0 if parent < 0 else mu[parent]
        if total <= 0.0:
            continue
        lam_x = lam[block]
        Q = m[block, block] * lam_x[None, :]
        system = np.vstack([np.diag(above + lam_x) - Q, ones])
        rhs = np.concatenate([acc[block], [total]])
        sol, *_ = linalg.lstsq(system, rhs)
        sol = np.clip(sol, 0.0, None)
        mass = sol.sum()
        mu[block] = sol * (total / mass) if mass > 0.0 else total / A
        weighted = lam_x * mu[block]
        acc += m[:, block] @ weighted
    return mu


def _dense_solve(tree: GameTree, profile: TriggerProfile) -> np.ndarray:
    phi = profile_matrix(tree, profile)
    C, b = tree.flow_matrix()
    system = np.vstack([phi - np.eye(tree.num_sequences), C])
    rhs = np.concatenate([np.zeros(tree.num_sequences), b])
    sol, *_ = linalg.lstsq(system, rhs)
    return np.clip(sol, 0.0, None)


def _cesaro(tree: GameTree, profile: TriggerProfile, steps: int = CESARO_STEPS) -> np.ndarray:
    mu = uniform_policy(tree)
    total = np.zeros_like(mu)
    for _ in range(steps):
        mu = profile_apply(tree, profile, mu)
        total += mu
    return total / steps


def fixed_point(
    tree: GameTree,
    profile: TriggerProfile,
    *,
    tol: float = FIXED_POINT_TOLERANCE,
    telemetry: Optional[TelemetrySink] = None,
) -> np.ndarray:
    """Return a sequence-form policy mu with ``||phi mu - mu||_inf <= tol`` and exact flow.

    Falls back to a dense least-squares solve and then to a Cesaro average of
    iterates; raises ``FixedPointError`` with the best residual if none succeeds.
    """

    sink = resolve_sink(telemetry)
    best = np.inf
    for name, solver in (("structured", _structured_solve), ("dense", _dense_solve), ("cesaro", _cesaro)):
        mu = solver(tree, profile)
        residual = max(fixed_point_residual(tree, profile, mu), flow_violation(tree, mu))
        if residual <= tol:
            return mu
        best = min(best, residual)
        sink.emit(Events.FIXED_POINT_FALLBACK, {"solver": name, "residual": residual})
    raise FixedPointError(best, tol)


__all__ = ["fixed_point", "fixed_point_residual", "FIXED_POINT_TOLERANCE", "FLOW_TOLERANCE"]
