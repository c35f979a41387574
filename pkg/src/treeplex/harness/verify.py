"""Self-checks: every recursion against brute-force enumeration on small games.

``run_verify`` executes each check, emits one ``verify.check`` event per
check and returns a report whose ``passed`` flag drives the CLI exit code.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..feedback.estimators import (
    adaptive_estimator,
    balanced_ix_estimator,
    balanced_reach,
    ix_estimator,
    ix_expectation,
)
from ..feedback.losses import expected_loss
from ..feedback.sampling import episode_rng, sample_trajectory
from ..games.efg import player_views
from ..games.environment import random_environment
from ..games.generators import random_tree
from ..games.kuhn import kuhn_poker
from ..games.policy import balanced_policies, descendant_counts, random_policy
from ..games.tree import GameTree
from ..learners.base import BaseLearner, Feedback
from ..learners.efce_omd import BalancedEfceOmd, BalancedEfceOmdIncremental, EfceOmd, EfceOmdIncremental
from ..learners.phi_hedge import PhiHedge
from ..learners.vertex import DilatedOmd, DilatedOmdIncremental, VertexMwu
from ..partition.balanced import balanced_value_at_zero, balanced_weights, log_partition_balanced
from ..partition.entropy import balanced_trigger_entropy, trigger_dilated_entropy
from ..partition.oracle import brute_force_log_partition
from ..partition.trigger import log_partition_trigger
from ..partition.vertex import kernel_eval, log_partition_vertex
from ..telemetry.base import Events, TelemetrySink, resolve_sink
from ..triggers.profile import TriggerProfile, profile_inner, profile_matrix
from ..triggers.vertices import enumerate_policies, enumerate_subtree_policies, enumerate_trigger_vertices
from .config import RunConfig
from .metrics import efce_gap, regret_gap
from .runner import run_self_play

ORACLE_TOLERANCE = 1e-9
EQUIVALENCE_TOLERANCE = 1e-8
RESIDUAL_TOLERANCE = 1e-10
IDENTITY_TOLERANCE = 1e-10
GRADIENT_TOLERANCE = 1e-6
FD_STEP = 1e-5
SIGMA_BAND = 4.0


@dataclass
class VerifyCheck:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


@dataclass
class VerifyReport:
    checks: List[VerifyCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


@dataclass(frozen=True)
class VerifyBudget:
    """Sample sizes; ``quick`` shrinks every loop for smoke runs."""

    loss_inputs: int = 100
    steps: int = 200
    sequences: int = 20
    variational_steps: int = 50
    variational_profiles: int = 100
    balance_policies: int = 50
    directions: int = 20
    self_play_T: int = 4096
    episodes: int = 20_000

    @classmethod
    def quick(cls) -> "VerifyBudget":
        return cls(
            loss_inputs=10,
            steps=30,
            sequences=3,
            variational_steps=8,
            variational_profiles=20,
            balance_policies=10,
            directions=5,
            self_play_T=32,
            episodes=4_000,
        )


def oracle_games() -> List[Tuple[str, GameTree]]:
    kuhn = player_views(kuhn_poker())
    return [
        ("depth1", random_tree(0, 1, 1, 3)),
        ("depth2", random_tree(1, 2, 1, 2)),
        ("depth2-wide", random_tree(2, 2, 2, 2)),
        ("depth3", random_tree(3, 3, 1, 2)),
        ("depth2-three-actions", random_tree(4, 2, 1, 3)),
        ("ragged", random_tree(5, 3, (0, 2), 2)),
        ("two-roots", random_tree(6, 2, 1, 2, roots=2)),
        ("ragged-two-roots", random_tree(7, 3, (0, 1), 2, roots=2)),
        ("kuhn-first", kuhn[0].tree),
        ("kuhn-second", kuhn[1].tree),
    ]


def full_games() -> List[Tuple[str, GameTree]]:
    return [(name, tree) for name, tree in oracle_games() if tree.is_full]


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def _random_profile(tree: GameTree, rng: np.random.Generator) -> TriggerProfile:
    XA, A = tree.num_sequences, tree.num_actions
    lam = rng.dirichlet(np.ones(XA))
    m = np.column_stack([random_policy(tree, rng, root=j // A) for j in range(XA)])
    return TriggerProfile(lam=lam, m=m)


# checks --------------------------------------------------------------------------


def check_trigger_partition(budget: VerifyBudget) -> str:
    worst = 0.0
    for name, tree in oracle_games():
        rng = np.random.default_rng(11)
        vertices = enumerate_trigger_vertices(tree)
        for k in range(budget.loss_inputs):
            M = rng.random((tree.num_sequences, tree.num_sequences)) * (1 + 4 * (k % 3))
            g = log_partition_trigger(tree, M)
            oracle = brute_force_log_partition(tree, vertices, M)
            worst = max(worst, _rel(g.value, oracle.value))
            worst = max(worst, float(np.abs(profile_matrix(tree, g.profile) - oracle.gradient).max()))
            if worst > ORACLE_TOLERANCE:
                raise AssertionError(f"{name}: trigger log-partition off by {worst:.3e}")
    return f"max error {worst:.2e}"


def check_vertex_partition(budget: VerifyBudget) -> str:
    worst = 0.0
    for name, tree in oracle_games():
        rng = np.random.default_rng(12)
        vertices = enumerate_policies(tree)
        for k in range(budget.loss_inputs):
            loss = rng.random(tree.num_sequences) * (1 + 4 * (k % 3))
            g = log_partition_vertex(tree, loss)
            oracle = brute_force_log_partition(tree, vertices, loss)
            worst = max(worst, _rel(g.value, oracle.value), float(np.abs(g.policy - oracle.gradient).max()))
            if worst > ORACLE_TOLERANCE:
                raise AssertionError(f"{name}: vertex log-partition off by {worst:.3e}")
    return f"max error {worst:.2e}"


def _central_difference(f: Callable[[np.ndarray], float], x: np.ndarray, d: np.ndarray) -> float:
    return (f(x + FD_STEP * d) - f(x - FD_STEP * d)) / (2.0 * FD_STEP)


def check_gradients(budget: VerifyBudget) -> str:
    """Directional derivatives of the three log-partitions against central differences."""

    worst = 0.0
    for name, tree in oracle_games():
        rng = np.random.default_rng(14)
        XA = tree.num_sequences
        weights = balanced_weights(tree)
        M = rng.random((XA, XA))
        loss = rng.random(XA)
        trigger = log_partition_trigger(tree, M).profile
        balanced = log_partition_balanced(tree, M, weights=weights).profile
        vertex = log_partition_vertex(tree, loss).policy
        for _ in range(budget.directions):
            D = rng.normal(size=(XA, XA))
            d = rng.normal(size=XA)
            pairs = [
                (_central_difference(lambda X: log_partition_trigger(tree, X).value, M, D), -trigger.inner(tree, D)),
                (
                    _central_difference(lambda X: log_partition_balanced(tree, X, weights=weights).value, M, D),
                    -balanced.inner(tree, D),
                ),
                (_central_difference(lambda x: log_partition_vertex(tree, x).value, loss, d), -float(vertex @ d)),
            ]
            worst = max(worst, *(_rel(numeric, analytic) for numeric, analytic in pairs))
            if worst > GRADIENT_TOLERANCE:
                raise AssertionError(f"{name}: gradient off its central difference by {worst:.3e}")
    return f"max relative error {worst:.2e}"


def check_kernel(budget: VerifyBudget) -> str:
    worst = 0.0
    for name, tree in oracle_games():
        rng = np.random.default_rng(13)
        for _ in range(budget.loss_inputs):
            b = np.exp(rng.normal(size=tree.num_sequences))
            x = int(rng.integers(tree.num_infosets))
            brute = sum(float(np.prod(b[v > 0])) for v in enumerate_subtree_policies(tree, x))
            worst = max(worst, _rel(kernel_eval(tree, b, x), brute))
            if worst > ORACLE_TOLERANCE:
                raise AssertionError(f"{name}: kernel off by {worst:.3e}")
    return f"max error {worst:.2e}"


def _lockstep(
    tree: GameTree,
    learners: List[BaseLearner],
    steps: int,
    rng: np.random.Generator,
) -> Tuple[float, float]:
    """Feed identical losses to every learner; returns (max policy spread, max residual)."""

    spread, residual = 0.0, 0.0
    for _ in range(steps):
        policies = np.array([learner.policy for learner in learners])
        spread = max(spread, float(np.abs(policies - policies[0]).max()))
        residual = max(residual, max(learner.residual() for learner in learners))
        loss = rng.random(tree.num_sequences)
        for learner in learners:
            learner.update(loss)
    return spread, residual


def check_learner_equivalence(budget: VerifyBudget) -> Tuple[str, float]:
    worst, residual = 0.0, 0.0
    games = [(n, t) for n, t in oracle_games() if n in {"depth2", "depth3", "ragged", "kuhn-second"}]
    for name, tree in games:
        for s in range(budget.sequences):
            eta = 0.05 + 0.1 * s
            groups = [
                [PhiHedge(tree, eta=eta), EfceOmd(tree, eta=eta), EfceOmdIncremental(tree, eta=eta)],
                [BalancedEfceOmd(tree, eta=eta), BalancedEfceOmdIncremental(tree, eta=eta)],
                [VertexMwu(tree, eta=eta), DilatedOmd(tree, eta=eta), DilatedOmdIncremental(tree, eta=eta)],
            ]
            for group in groups:
                spread, res = _lockstep(tree, group, budget.steps, np.random.default_rng(100 + s))
                worst, residual = max(worst, spread), max(residual, res)
                if worst > EQUIVALENCE_TOLERANCE:
                    names = ", ".join(type(learner).__name__ for learner in group)
                    raise AssertionError(f"{name}: {names} disagree by {worst:.3e}")
    return f"max policy gap {worst:.2e}", residual


def check_variational(budget: VerifyBudget) -> str:
    margin = np.inf
    for name, tree in [("depth2", random_tree(1, 2, 1, 2)), ("ragged", random_tree(5, 3, (0, 2), 2))]:
        rng = np.random.default_rng(21)
        for balanced in (False, True):
            learner = BalancedEfceOmd(tree, eta=0.3) if balanced else EfceOmd(tree, eta=0.3)
            weights = learner.weights
            for _ in range(budget.variational_steps):
                learner.update(rng.random(tree.num_sequences))
                L = learner.eta * learner.cumulative

                def objective(profile: TriggerProfile) -> float:
                    if balanced:
                        reg = balanced_trigger_entropy(tree, profile, weights)
                    else:
                        reg = trigger_dilated_entropy(tree, profile)
                    return profile_inner(tree, profile, L) + reg

                best = objective(learner.profile)
                for _ in range(budget.variational_profiles):
                    margin = min(margin, objective(_random_profile(tree, rng)) - best)
                if margin < -ORACLE_TOLERANCE:
                    raise AssertionError(f"{name}: a random profile beats the iterate by {-margin:.3e}")
    return f"smallest margin {margin:.2e}"


def check_balancing(budget: VerifyBudget) -> str:
    worst = 0.0
    for name, tree in oracle_games():
        policies = balanced_policies(tree)
        star = balanced_reach(tree, policies)
        rng = np.random.default_rng(31)
        sizes = tree.layer_sizes
        for h in range(1, tree.horizon + 1):
            layer = tree.seq_layer == h
            bound = 1.0 / (sizes[h - 1] * tree.num_actions)
            if star[layer].min() < bound - ORACLE_TOLERANCE:
                raise AssertionError(f"{name}: balanced reach below 1/(X_h A) at layer {h}")
            for _ in range(budget.balance_policies):
                mu = random_policy(tree, rng)
                total = float((mu[layer] / star[layer]).sum())
                cap = sizes[h - 1] * tree.num_actions
                if total > cap * (1 + ORACLE_TOLERANCE):
                    raise AssertionError(f"{name}: balancing sum {total} exceeds {cap} at layer {h}")
                if tree.is_full:
                    worst = max(worst, _rel(total, cap))
        if tree.is_full:
            closed = balanced_value_at_zero(tree, descendant_counts(tree))
            value = log_partition_balanced(tree, np.zeros((tree.num_sequences,) * 2), policies).value
            worst = max(worst, _rel(value, closed))
        if worst > ORACLE_TOLERANCE:
            raise AssertionError(f"{name}: balanced identities off by {worst:.3e}")
    return f"max error {worst:.2e}"


def check_online_to_batch(budget: VerifyBudget) -> str:
    game = kuhn_poker()
    config = RunConfig(game="kuhn", T=budget.self_play_T, players=2, feedback=Feedback.FULL)
    joint = run_self_play([config], game, with_efce_gap=False)
    gap = efce_gap(game, player_views(game), joint.product_policies())
    expected = max(0.0, regret_gap(joint))
    error = abs(gap - expected)
    if error > IDENTITY_TOLERANCE:
        raise AssertionError(f"EFCE gap {gap} differs from max regret / T {expected} by {error:.3e}")
    drift = float(np.abs(joint.utilities.sum(axis=1)).max())
    if drift > IDENTITY_TOLERANCE:
        raise AssertionError(f"expected values do not sum to zero (drift {drift:.3e})")
    return f"gap {gap:.4e}, identity error {error:.1e}"


def check_estimators(budget: VerifyBudget) -> str:
    tree = random_tree(8, 3, 1, 2)
    env = random_environment(tree, np.random.default_rng(41))
    loss = expected_loss(env)
    policy = random_policy(tree, np.random.default_rng(42))
    policies = balanced_policies(tree)
    star = balanced_reach(tree, policies)
    profile = _random_profile(tree, np.random.default_rng(43))
    worst_z = 0.0
    for gamma in (0.0, 0.1):
        samples = np.zeros((budget.episodes, tree.num_sequences))
        for n in range(budget.episodes):
            traj = sample_trajectory(env, policy, episode_rng(44, n))
            est = ix_estimator(tree, traj, policy, gamma)
            if policy @ est > tree.horizon + 1e-12:
                raise AssertionError(f"<mu, estimate> = {policy @ est} exceeds H")
            if gamma > 0.0:
                family = adaptive_estimator(tree, traj, policy, profile, star, gamma)
                dominating = balanced_ix_estimator(tree, traj, policy, gamma, star)
                if np.any(family > dominating[:, None] + 1e-12):
                    raise AssertionError("adaptive estimate exceeds its dominating IX estimate")
            samples[n] = est
        mean = samples.mean(axis=0)
        se = samples.std(axis=0, ddof=1) / np.sqrt(budget.episodes)
        target = ix_expectation(loss, policy, gamma)
        live = se > 0.0
        z = np.abs(mean - target)[live] / se[live]
        worst_z = max(worst_z, float(z.max(initial=0.0)))
        if np.any(np.abs(mean - target)[~live] > 1e-12):
            raise AssertionError("estimator is constant but off its expectation")
        if worst_z > SIGMA_BAND:
            raise AssertionError(f"IX mean off by {worst_z:.2f} standard errors at gamma={gamma}")
    return f"largest z-score {worst_z:.2f}"


# runner --------------------------------------------------------------------------


def run_verify(*, quick: bool = False, telemetry: Optional[TelemetrySink] = None) -> VerifyReport:
    sink = resolve_sink(telemetry)
    budget = VerifyBudget.quick() if quick else VerifyBudget()
    report = VerifyReport()
    residual_holder: List[float] = []

    def equivalence() -> str:
        detail, residual = check_learner_equivalence(budget)
        residual_holder.append(residual)
        return detail

    def fixed_point() -> str:
        if not residual_holder:
            raise AssertionError("no learner runs to inspect")
        residual = residual_holder[0]
        if residual > RESIDUAL_TOLERANCE:
            raise AssertionError(f"fixed-point residual {residual:.3e}")
        return f"max residual {residual:.2e}"

    checks: List[Tuple[str, Callable[[], str]]] = [
        ("trigger log-partition vs enumeration", lambda: check_trigger_partition(budget)),
        ("vertex log-partition vs enumeration", lambda: check_vertex_partition(budget)),
        ("gradients vs central differences", lambda: check_gradients(budget)),
        ("kernel vs enumeration", lambda: check_kernel(budget)),
        ("learner equivalences", equivalence),
        ("FTRL variational optimality", lambda: check_variational(budget)),
        ("balancing and closed forms", lambda: check_balancing(budget)),
        ("fixed-point residual", fixed_point),
        ("online-to-batch identity", lambda: check_online_to_batch(budget)),
        ("estimator statistics", lambda: check_estimators(budget)),
    ]
    for name, fn in checks:
        started = time.perf_counter()
        try:
            detail, passed = fn(), True
        except Exception as exc:
            detail, passed = f"{type(exc).__name__}: {exc}", False
        check = VerifyCheck(name=name, passed=passed, detail=detail, seconds=time.perf_counter() - started)
        report.checks.append(check)
        sink.emit(Events.VERIFY_CHECK, {"name": name, "passed": passed, "detail": detail, "seconds": check.seconds})
    sink.emit(Events.VERIFY_COMPLETED, {"passed": report.passed, "checks": len(report.checks)})
    return report


__all__ = [
    "VerifyBudget",
    "VerifyCheck",
    "VerifyReport",
    "oracle_games",
    "run_verify",
    "check_trigger_partition",
    "check_vertex_partition",
    "check_gradients",
    "check_kernel",
    "check_learner_equivalence",
    "check_variational",
    "check_balancing",
    "check_online_to_batch",
    "check_estimators",
]
