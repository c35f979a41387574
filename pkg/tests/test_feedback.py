import numpy as np
import pytest

from treeplex.errors import EstimatorError
from treeplex.feedback import (
    adaptive_estimator,
    adaptive_expectation,
    assemble_adaptive_matrix,
    assemble_matrix,
    balanced_ix_estimator,
    balanced_reach,
    episode_rng,
    expected_loss,
    ix_estimator,
    ix_expectation,
    sample_trajectory,
)
from treeplex.games.environment import RewardKind, Step, Trajectory, random_environment, uniform_environment
from treeplex.games.generators import random_tree
from treeplex.games.policy import balanced_policies, random_policy, uniform_policy
from treeplex.games.tree import build_game
from treeplex.partition import log_partition_trigger

DETERMINISTIC = np.array([1.0, 0.0, 1.0, 0.0, 0.0, 0.0])


def make_tree():
    return build_game(
        {
            "layers": [["x1"], ["x2a", "x2b"]],
            "num_actions": 2,
            "children": {"x1,0": ["x2a"], "x1,1": ["x2b"]},
        }
    )


def make_profile(tree, seed=0):
    M = np.random.default_rng(seed).random((tree.num_sequences, tree.num_sequences))
    return log_partition_trigger(tree, M).profile


def test_expected_loss_scales_by_environment_reach():
    tree = make_tree()
    env = uniform_environment(tree, 0.25)
    np.testing.assert_allclose(expected_loss(env), np.full(6, 0.75))
    assert float(uniform_policy(tree) @ expected_loss(uniform_environment(tree))) == pytest.approx(tree.horizon)


def test_matrix_assembly():
    loss = np.array([0.5, 0.0, 0.2, 0.1, 0.0, 0.0])
    M = assemble_matrix(loss, DETERMINISTIC)
    np.testing.assert_allclose(M.dense(), np.outer(loss, DETERMINISTIC))
    np.testing.assert_allclose(M.diagonal(), loss * DETERMINISTIC)
    assert list(M.nonzero_columns()) == [0, 2]
    assert len(assemble_matrix(np.zeros(6), DETERMINISTIC).nonzero_columns()) == 0
    with pytest.raises(ValueError, match="nonnegative"):
        assemble_matrix(-loss, DETERMINISTIC)


def test_adaptive_matrix_keeps_played_columns():
    family = np.random.default_rng(0).random((6, 6))
    M = assemble_adaptive_matrix(family, DETERMINISTIC)
    dense = M.dense()
    np.testing.assert_allclose(dense[:, 0], family[:, 0])
    np.testing.assert_allclose(dense[:, 1], 0.0)
    np.testing.assert_allclose(M.diagonal(), np.diag(dense))


def test_column_access_matches_the_dense_matrix():
    family = np.random.default_rng(1).random((6, 6))
    cols = np.array([0, 1, 2, 5])
    for M in (assemble_matrix(family[:, 0], DETERMINISTIC), assemble_adaptive_matrix(family, DETERMINISTIC)):
        dense = M.dense()
        np.testing.assert_allclose(M.column_block(cols), dense[:, cols])
        total = np.ones((6, 6))
        M.add_to(total)
        np.testing.assert_allclose(total, 1.0 + dense)


def test_episode_rng_is_keyed_by_seed_episode_and_stream():
    first = episode_rng(1, 2, 0).random(4)
    np.testing.assert_array_equal(first, episode_rng(1, 2, 0).random(4))
    assert not np.array_equal(first, episode_rng(1, 2, 1).random(4))
    assert not np.array_equal(first, episode_rng(1, 3, 0).random(4))


def test_sampled_trajectory_follows_a_deterministic_policy():
    tree = make_tree()
    env = uniform_environment(tree, 0.3, RewardKind.EXACT)
    traj = sample_trajectory(env, DETERMINISTIC, episode_rng(0, 1))
    traj.check(tree)
    assert traj.sequences(tree) == [0, 2]
    assert [s.reward for s in traj.steps] == [0.3, 0.3]


def test_ix_estimator_values():
    tree = make_tree()
    env = uniform_environment(tree, 0.3, RewardKind.EXACT)
    traj = sample_trajectory(env, DETERMINISTIC, episode_rng(0, 1))
    np.testing.assert_allclose(ix_estimator(tree, traj, DETERMINISTIC, 0.0), [0.7, 0, 0.7, 0, 0, 0])
    np.testing.assert_allclose(ix_estimator(tree, traj, DETERMINISTIC, 0.5), [0.7 / 1.5, 0, 0.7 / 1.5, 0, 0, 0])


def test_estimator_rejects_zero_probability_visits():
    tree = make_tree()
    off_policy = Trajectory((Step(0, 1, 0.0),))
    with pytest.raises(EstimatorError):
        ix_estimator(tree, off_policy, DETERMINISTIC, 0.0)
    with pytest.raises(ValueError, match="gamma"):
        ix_estimator(tree, off_policy, DETERMINISTIC, -0.1)


def test_estimate_inner_product_is_bounded_by_horizon():
    tree = random_tree(3, 3, (1, 2), 2)
    rng = np.random.default_rng(1)
    env = random_environment(tree, rng)
    for episode in range(200):
        mu = random_policy(tree, rng)
        traj = sample_trajectory(env, mu, episode_rng(9, episode))
        assert float(mu @ ix_estimator(tree, traj, mu, 0.1)) <= tree.horizon + 1e-12


def test_adaptive_family_is_dominated_by_balanced_estimator():
    tree = random_tree(2, 3, 2, 2)
    star = balanced_reach(tree, balanced_policies(tree))
    profile = make_profile(tree)
    rng = np.random.default_rng(2)
    env = random_environment(tree, rng)
    mu = random_policy(tree, rng)
    for episode in range(50):
        traj = sample_trajectory(env, mu, episode_rng(4, episode))
        family = adaptive_estimator(tree, traj, mu, profile, star, 0.2)
        single = balanced_ix_estimator(tree, traj, mu, 0.2, star)
        assert np.all(family <= single[:, None] + 1e-15)


def test_ix_estimator_mean_matches_expectation():
    tree = random_tree(4, 2, 2, 2)
    env = uniform_environment(tree, np.random.default_rng(3).uniform(0.2, 0.8, tree.num_sequences))
    mu = uniform_policy(tree)
    gamma = 0.3
    n = 4000
    draws = np.array(
        [ix_estimator(tree, sample_trajectory(env, mu, episode_rng(5, t)), mu, gamma) for t in range(n)]
    )
    sigma = draws.std(axis=0) / np.sqrt(n)
    expected = ix_expectation(expected_loss(env), mu, gamma)
    assert np.all(np.abs(draws.mean(axis=0) - expected) <= 4.0 * sigma + 1e-12)


def test_adaptive_estimator_mean_matches_expectation():
    tree = random_tree(4, 2, 2, 2)
    star = balanced_reach(tree, balanced_policies(tree))
    profile = make_profile(tree, seed=1)
    env = uniform_environment(tree, np.random.default_rng(4).uniform(0.2, 0.8, tree.num_sequences))
    mu = uniform_policy(tree)
    gamma = 0.3
    n = 4000
    total = np.zeros((tree.num_sequences, tree.num_sequences))
    square = np.zeros_like(total)
    for t in range(n):
        family = adaptive_estimator(tree, sample_trajectory(env, mu, episode_rng(6, t)), mu, profile, star, gamma)
        total += family
        square += family**2
    mean = total / n
    sigma = np.sqrt(np.maximum(square / n - mean**2, 0.0) / n)
    expected = adaptive_expectation(expected_loss(env), mu, profile, star, gamma)
    assert np.all(np.abs(mean - expected) <= 4.0 * sigma + 1e-12)
