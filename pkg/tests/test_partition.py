import numpy as np
import pytest

from treeplex.games.efg import player_views
from treeplex.games.generators import random_tree
from treeplex.games.kuhn import kuhn_poker
from treeplex.partition import (
    balanced_value_at_zero,
    brute_force_log_partition,
    incremental_recursion,
    kernel_eval,
    log_kernel_eval,
    log_partition_balanced,
    log_partition_trigger,
    log_partition_vertex,
)
from treeplex.games.policy import validate_sequence
from treeplex.partition.balanced import balanced_weights
from treeplex.partition.trigger import weighted_log_partition
from treeplex.partition.vertex import vertex_recursion
from treeplex.triggers import enumerate_policies, enumerate_subtree_policies, enumerate_trigger_vertices


def make_trees():
    return [
        random_tree(1, 2, 1, 2),
        random_tree(5, 3, (0, 2), 2),
        random_tree(8, 2, (1, 2), 3),
        player_views(kuhn_poker())[1].tree,
    ]


def test_trigger_partition_matches_enumeration():
    rng = np.random.default_rng(0)
    for tree in make_trees():
        vertices = enumerate_trigger_vertices(tree)
        for _ in range(5):
            M = rng.random((tree.num_sequences, tree.num_sequences)) * 3.0
            fast = log_partition_trigger(tree, M)
            brute = brute_force_log_partition(tree, vertices, M)
            assert fast.value == pytest.approx(brute.value, rel=1e-9)
            np.testing.assert_allclose(fast.profile.matrix(tree), brute.gradient, atol=1e-9)


def test_trigger_partition_on_kuhn_first_player():
    tree = player_views(kuhn_poker())[0].tree
    vertices = enumerate_trigger_vertices(tree)
    assert len(vertices) == 54
    M = np.random.default_rng(1).random((tree.num_sequences, tree.num_sequences))
    assert log_partition_trigger(tree, M).value == pytest.approx(
        brute_force_log_partition(tree, vertices, M).value, rel=1e-9
    )


def test_gradient_profile_is_valid():
    tree = random_tree(5, 3, (0, 2), 2)
    M = np.random.default_rng(2).random((tree.num_sequences, tree.num_sequences))
    gradient = log_partition_trigger(tree, M)
    gradient.profile.validate(tree)
    assert gradient.lam.sum() == pytest.approx(1.0)


def test_nan_loss_is_rejected():
    tree = random_tree(1, 2, 1, 2)
    M = np.zeros((tree.num_sequences, tree.num_sequences))
    M[0, 0] = np.nan
    with pytest.raises(ValueError, match="NaN"):
        log_partition_trigger(tree, M)
    with pytest.raises(ValueError, match="NaN"):
        log_partition_vertex(tree, M[:, 0])


def test_vertex_partition_matches_enumeration():
    rng = np.random.default_rng(3)
    for tree in make_trees():
        policies = enumerate_policies(tree)
        loss = rng.random(tree.num_sequences) * 4.0
        fast = log_partition_vertex(tree, loss)
        brute = brute_force_log_partition(tree, policies, loss)
        assert fast.value == pytest.approx(brute.value, rel=1e-9)
        np.testing.assert_allclose(fast.policy, brute.gradient, atol=1e-9)


def test_kernel_matches_product_over_subtree_policies():
    tree = random_tree(5, 3, (0, 2), 2)
    b = np.random.default_rng(4).uniform(0.2, 3.0, tree.num_sequences)
    for x in range(tree.num_infosets):
        brute = sum(float(np.prod(b[v == 1.0])) for v in enumerate_subtree_policies(tree, x))
        assert kernel_eval(tree, b, x) == pytest.approx(brute, rel=1e-10)
        assert log_kernel_eval(tree, b, x) == pytest.approx(np.log(brute), abs=1e-10)
    with pytest.raises(ValueError, match="positive"):
        kernel_eval(tree, np.zeros(tree.num_sequences), 0)


def test_kernel_switches_to_log_space_for_large_weights():
    tree = random_tree(1, 2, 1, 2)
    b = np.full(tree.num_sequences, np.exp(60.0))
    assert kernel_eval(tree, b, 0) == pytest.approx(np.exp(log_kernel_eval(tree, b, 0)), rel=1e-10)
    assert log_kernel_eval(tree, b, 0) == pytest.approx(120.0 + 2.0 * np.log(2.0), rel=1e-12)


def test_increments_telescope_to_the_full_recursion():
    tree = random_tree(5, 3, (0, 2), 2)
    rng = np.random.default_rng(5)
    F0, beh0 = vertex_recursion(tree, np.zeros(tree.num_sequences))
    log_beh = np.log(beh0)[:, :, None]
    total_inc = np.zeros(tree.num_infosets)
    cumulative = np.zeros(tree.num_sequences)
    for _ in range(25):
        loss = rng.random(tree.num_sequences)
        cumulative += loss
        inc, log_beh = incremental_recursion(tree, loss[:, None], log_beh)
        total_inc += inc[:, 0]
    F, beh = vertex_recursion(tree, cumulative)
    np.testing.assert_allclose(total_inc, F - F0, atol=1e-9)
    np.testing.assert_allclose(np.exp(log_beh[:, :, 0]), beh, atol=1e-9)


def test_balanced_partition_at_zero_has_closed_form():
    for tree in (random_tree(1, 3, 1, 2), random_tree(2, 3, 2, 2), random_tree(3, 2, 2, 3)):
        assert tree.is_full
        zero = np.zeros((tree.num_sequences, tree.num_sequences))
        assert log_partition_balanced(tree, zero).value == pytest.approx(balanced_value_at_zero(tree), rel=1e-10)


def test_balanced_gradient_is_a_valid_profile():
    tree = random_tree(2, 3, 2, 2)
    M = np.random.default_rng(6).random((tree.num_sequences, tree.num_sequences))
    log_partition_balanced(tree, M).profile.validate(tree)


# gradients and large losses ------------------------------------------------------

STEP = 1e-5
DIRECTIONS = 20


def central_difference(f, x, d):
    return (f(x + STEP * d) - f(x - STEP * d)) / (2.0 * STEP)


def assert_close_relative(numeric, analytic):
    assert abs(numeric - analytic) <= 1e-6 * max(1.0, abs(analytic))


def test_trigger_gradient_matches_finite_differences():
    rng = np.random.default_rng(7)
    for tree in make_trees():
        M = rng.random((tree.num_sequences, tree.num_sequences))
        profile = log_partition_trigger(tree, M).profile
        for _ in range(DIRECTIONS):
            D = rng.normal(size=M.shape)
            numeric = central_difference(lambda X: log_partition_trigger(tree, X).value, M, D)
            assert_close_relative(numeric, -profile.inner(tree, D))


def test_balanced_gradient_matches_finite_differences():
    rng = np.random.default_rng(8)
    for tree in make_trees():
        weights = balanced_weights(tree)
        M = rng.random((tree.num_sequences, tree.num_sequences))
        profile = log_partition_balanced(tree, M, weights=weights).profile
        for _ in range(DIRECTIONS):
            D = rng.normal(size=M.shape)
            numeric = central_difference(lambda X: log_partition_balanced(tree, X, weights=weights).value, M, D)
            assert_close_relative(numeric, -profile.inner(tree, D))


def test_vertex_gradient_matches_finite_differences():
    rng = np.random.default_rng(9)
    for tree in make_trees():
        loss = rng.random(tree.num_sequences)
        policy = log_partition_vertex(tree, loss).policy
        for _ in range(DIRECTIONS):
            d = rng.normal(size=loss.shape)
            numeric = central_difference(lambda x: log_partition_vertex(tree, x).value, loss, d)
            assert_close_relative(numeric, -float(policy @ d))


def test_large_losses_stay_finite():
    rng = np.random.default_rng(10)
    for tree in make_trees():
        XA = tree.num_sequences
        M = rng.random((XA, XA)) * 1e4
        for gradient in (
            log_partition_trigger(tree, M),
            weighted_log_partition(tree, M, balanced_weights(tree), float(XA)),
        ):
            assert np.isfinite(gradient.value)
            assert np.all(np.isfinite(gradient.lam)) and np.all(np.isfinite(gradient.m))
            assert gradient.lam.sum() == pytest.approx(1.0)
            gradient.profile.validate(tree)
        vertex = log_partition_vertex(tree, rng.random(XA) * 1e4)
        assert np.isfinite(vertex.value)
        validate_sequence(tree, vertex.policy)
