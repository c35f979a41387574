import math

import numpy as np
import pytest

from treeplex.games.environment import random_environment
from treeplex.games.generators import random_tree
from treeplex.games.tree import build_game
from treeplex.feedback import LossMatrix, episode_rng, expected_loss, sample_trajectory
from treeplex.learners import (
    Algorithm,
    BalancedEfceOmd,
    BalancedEfceOmdIncremental,
    DilatedOmd,
    DilatedOmdIncremental,
    EfceOmd,
    EfceOmdIncremental,
    Feedback,
    HyperParameters,
    LearnerRegistry,
    LearnerSnapshot,
    PhiHedge,
    VertexMwu,
    build_learner,
    full_feedback_defaults,
    tuned_defaults,
)
from treeplex.telemetry.base import Events
from treeplex.telemetry.recorder import StructuredTelemetrySink
from treeplex.triggers import trigger_regret_from_cumulative


def make_tree():
    return build_game(
        {
            "layers": [["x1"], ["x2a", "x2b"]],
            "num_actions": 2,
            "children": {"x1,0": ["x2a"], "x1,1": ["x2b"]},
        }
    )


def make_losses(tree, steps, seed=0):
    return np.random.default_rng(seed).random((steps, tree.num_sequences))


def run_lockstep(learners, losses):
    for loss in losses:
        reference = learners[0].policy
        for learner in learners[1:]:
            np.testing.assert_allclose(learner.policy, reference, atol=1e-8)
        for learner in learners:
            learner.update(loss)


def test_trigger_learners_agree_in_lockstep():
    tree = random_tree(1, 2, 1, 2)
    learners = [cls(tree, eta=0.4) for cls in (PhiHedge, EfceOmd, EfceOmdIncremental)]
    run_lockstep(learners, make_losses(tree, 30))
    for learner in learners:
        assert learner.residual() <= 1e-10


def test_trigger_learners_agree_on_ragged_tree():
    tree = random_tree(5, 3, (0, 2), 2)
    learners = [cls(tree, eta=0.3) for cls in (PhiHedge, EfceOmd, EfceOmdIncremental)]
    run_lockstep(learners, make_losses(tree, 20, seed=1))


def test_balanced_learners_agree_in_lockstep():
    tree = random_tree(2, 3, 2, 2)
    learners = [BalancedEfceOmd(tree, eta=0.2), BalancedEfceOmdIncremental(tree, eta=0.2)]
    run_lockstep(learners, make_losses(tree, 30, seed=2))


def test_vertex_learners_agree_in_lockstep():
    tree = random_tree(5, 3, (0, 2), 2)
    learners = [cls(tree, eta=0.5) for cls in (VertexMwu, DilatedOmd, DilatedOmdIncremental)]
    run_lockstep(learners, make_losses(tree, 30, seed=3))


def test_bandit_updates_agree_between_full_and_incremental_forms():
    tree = random_tree(2, 3, 2, 2)
    env = random_environment(tree, np.random.default_rng(4))
    pairs = [
        (EfceOmd(tree, eta=0.2, gamma=0.1), EfceOmdIncremental(tree, eta=0.2, gamma=0.1)),
        (BalancedEfceOmd(tree, eta=0.2, gamma=0.1), BalancedEfceOmdIncremental(tree, eta=0.2, gamma=0.1)),
    ]
    for episode in range(25):
        for full, incremental in pairs:
            np.testing.assert_allclose(incremental.policy, full.policy, atol=1e-8)
            traj = sample_trajectory(env, full.policy, episode_rng(7, episode))
            full.update_bandit(traj)
            incremental.update_bandit(traj)
    assert pairs[0][0].t == 25
    assert np.all(pairs[0][0].cumulative >= 0.0)


def test_constant_loss_moves_mass_to_the_cheaper_action():
    tree = build_game({"layers": [["root"]], "num_actions": 2})
    learner = PhiHedge(tree, eta=0.5)
    to_second = np.array([v.subtree_policy[1] == 1.0 for v in learner.vertices])
    masses = [float(learner.vertex_weights[to_second].sum())]
    for _ in range(100):
        learner.update(np.array([1.0, 0.0]))
        masses.append(float(learner.vertex_weights[to_second].sum()))
    assert all(b >= a - 1e-12 for a, b in zip(masses, masses[1:]))
    assert learner.policy[1] > 0.99


def test_phi_hedge_regret_stays_below_its_bound():
    tree = random_tree(1, 2, 1, 2)
    learner = PhiHedge(tree, eta=0.3)
    for loss in make_losses(tree, 60, seed=5):
        learner.update(loss)
    assert trigger_regret_from_cumulative(tree, learner.cumulative) <= learner.regret_bound() + 1e-9


@pytest.mark.parametrize("algorithm", list(Algorithm))
def test_snapshot_restore_resumes_identically(algorithm):
    tree = random_tree(1, 2, 1, 2)
    hyper = HyperParameters(eta=0.3, gamma=0.05)
    losses = make_losses(tree, 10, seed=6)
    original = build_learner(algorithm, tree, hyper)
    for loss in losses[:5]:
        original.update(loss)
    snapshot = LearnerSnapshot.model_validate_json(original.snapshot().model_dump_json())
    resumed = build_learner(algorithm, tree, hyper)
    resumed.restore(snapshot)
    assert resumed.t == 5
    for loss in losses[5:]:
        np.testing.assert_allclose(resumed.policy, original.policy, atol=1e-10)
        original.update(loss)
        resumed.update(loss)


def test_restore_rejects_foreign_snapshot():
    tree = make_tree()
    snapshot = EfceOmd(tree, eta=0.1).snapshot()
    with pytest.raises(ValueError, match="efce-omd"):
        DilatedOmd(tree, eta=0.1).restore(snapshot)


def test_incremental_learner_resyncs_on_schedule():
    tree = random_tree(5, 3, (0, 2), 2)
    sink = StructuredTelemetrySink()
    incremental = EfceOmdIncremental(tree, eta=0.3, telemetry=sink, resync_every=4)
    reference = EfceOmd(tree, eta=0.3)
    run_lockstep([reference, incremental], make_losses(tree, 9, seed=7))
    resyncs = [e for e in sink.events if e.event == Events.LEARNER_RESYNCED]
    assert [e.payload["t"] for e in resyncs] == [4, 8]
    assert all(e.payload["drift"] <= 1e-8 for e in resyncs)


def test_invalid_learning_parameters_are_rejected():
    tree = make_tree()
    with pytest.raises(ValueError, match="learning rate"):
        EfceOmd(tree, eta=0.0)
    with pytest.raises(ValueError, match="IX"):
        EfceOmd(tree, eta=0.1, gamma=-1.0)
    with pytest.raises(ValueError, match="resync_every"):
        EfceOmdIncremental(tree, eta=0.1, resync_every=-1)
    with pytest.raises(ValueError, match="length"):
        EfceOmd(tree, eta=0.1).update(np.ones(3))


def test_registry_lists_and_builds_every_algorithm():
    registry = LearnerRegistry()
    assert list(registry.list()) == sorted(a.value for a in Algorithm)
    with pytest.raises(ValueError):
        registry.register(EfceOmd)
    with pytest.raises(ValueError):
        registry.get("no-such-learner")
    learner = registry.build("efce-omd-inc", make_tree(), HyperParameters(eta=0.1), resync_every=3)
    assert isinstance(learner, EfceOmdIncremental)
    assert learner.resync_every == 3


def test_full_feedback_defaults_follow_tree_size():
    tree = make_tree()
    hyper = full_feedback_defaults(tree, 100, eta_constant=2.0)
    iota = math.log(6)
    assert hyper.iota == pytest.approx(iota)
    assert hyper.eta == pytest.approx(2.0 * math.sqrt(2 * iota / (4 * 100)))
    assert hyper.regret_bound == pytest.approx(2.0 * math.sqrt(4 * 2 * iota * 100))


def test_tuned_defaults_pick_the_matching_regime():
    tree = make_tree()
    bandit = tuned_defaults(tree, Algorithm.EFCE_OMD, Feedback.BANDIT, 100, delta=0.05)
    assert bandit.gamma == pytest.approx(math.sqrt(2 * math.log(18 / 0.05) / (6 * 100)))
    assert bandit.eta == pytest.approx(math.sqrt(2 * math.log(2) / (2 * 6 * 100)))
    balanced = tuned_defaults(tree, Algorithm.BALANCED_EFCE_OMD, Feedback.FULL, 100, delta=0.05)
    iota = math.log(10 * 6 / 0.05)
    assert balanced.eta == pytest.approx(math.sqrt(6 * iota / (16 * 100)))
    assert balanced.gamma == pytest.approx(2.0 * math.sqrt(6 * iota / (4 * 100)))
    vertex = tuned_defaults(tree, Algorithm.VERTEX_MWU, Feedback.FULL, 100)
    assert vertex.eta == pytest.approx(math.sqrt(2 * math.log(4) / (4 * 100)))
    with pytest.raises(ValueError):
        tuned_defaults(tree, Algorithm.EFCE_OMD, Feedback.FULL, 0)


def test_incremental_steps_never_build_the_full_loss_matrix(monkeypatch):
    tree = random_tree(2, 3, 2, 2)
    env = random_environment(tree, np.random.default_rng(8))
    learners = [EfceOmdIncremental(tree, eta=0.2, gamma=0.1), BalancedEfceOmdIncremental(tree, eta=0.2, gamma=0.1)]
    references = [EfceOmd(tree, eta=0.2, gamma=0.1), BalancedEfceOmd(tree, eta=0.2, gamma=0.1)]

    def refuse(self):
        raise AssertionError("dense loss matrix requested")

    for episode in range(10):
        for learner, reference in zip(learners, references):
            np.testing.assert_allclose(learner.policy, reference.policy, atol=1e-8)
            traj = sample_trajectory(env, reference.policy, episode_rng(9, episode))
            reference.update_bandit(traj)
            with monkeypatch.context() as patch:
                patch.setattr(LossMatrix, "dense", refuse)
                learner.update_bandit(traj)
                learner.update(expected_loss(env))
            reference.update(expected_loss(env))


def test_incremental_learner_keeps_cumulative_only_for_resync():
    tree = make_tree()
    plain = EfceOmdIncremental(tree, eta=0.3)
    assert plain.cumulative is None
    assert "cumulative" not in plain.snapshot().arrays
    resyncing = EfceOmdIncremental(tree, eta=0.3, resync_every=5)
    resyncing.update(np.full(tree.num_sequences, 0.5))
    assert "cumulative" in resyncing.snapshot().arrays
    assert resyncing.cumulative.sum() > 0.0
