import math

import numpy as np
import pytest

from treeplex.errors import PolicyError
from treeplex.games.generators import random_tree
from treeplex.games.policy import random_policy, uniform_policy
from treeplex.games.tree import build_game
from treeplex.partition import (
    balanced_trigger_entropy,
    balanced_trigger_kl,
    balanced_weights,
    dilated_entropy,
    dilated_kl,
    log_partition_balanced,
    log_partition_trigger,
    log_partition_vertex,
    trigger_dilated_entropy,
    trigger_dilated_kl,
)


def make_tree():
    return build_game(
        {
            "layers": [["x1"], ["x2a", "x2b"]],
            "num_actions": 2,
            "children": {"x1,0": ["x2a"], "x1,1": ["x2b"]},
        }
    )


def test_dilated_entropy_of_uniform_and_deterministic_policies():
    tree = make_tree()
    assert dilated_entropy(tree, uniform_policy(tree)) == pytest.approx(-2.0 * math.log(2.0))
    assert dilated_entropy(tree, np.array([1.0, 0.0, 0.0, 1.0, 0.0, 0.0])) == 0.0
    assert dilated_entropy(tree, uniform_policy(tree), root=1) == pytest.approx(-0.5 * math.log(2.0))


def test_dilated_kl_is_nonnegative_and_zero_on_the_diagonal():
    tree = random_tree(3, 3, (1, 2), 3)
    rng = np.random.default_rng(0)
    for _ in range(10):
        mu, nu = random_policy(tree, rng), random_policy(tree, rng)
        assert dilated_kl(tree, mu, mu) == pytest.approx(0.0, abs=1e-12)
        assert dilated_kl(tree, mu, nu) >= 0.0


def test_kl_against_vanishing_reference_is_rejected():
    tree = make_tree()
    with pytest.raises(PolicyError):
        dilated_kl(tree, uniform_policy(tree), np.array([1.0, 0.0, 1.0, 0.0, 0.0, 0.0]))


def test_vertex_partition_is_conjugate_to_dilated_entropy():
    tree = random_tree(4, 3, (1, 2), 2)
    loss = np.random.default_rng(1).random(tree.num_sequences) * 2.0
    gradient = log_partition_vertex(tree, loss)
    mu = gradient.policy
    assert gradient.value == pytest.approx(-(mu @ loss) - dilated_entropy(tree, mu), rel=1e-9)


def test_trigger_partition_is_conjugate_to_trigger_entropy():
    tree = random_tree(4, 3, (1, 2), 2)
    M = np.random.default_rng(2).random((tree.num_sequences, tree.num_sequences))
    gradient = log_partition_trigger(tree, M)
    profile = gradient.profile
    expected = -profile.inner(tree, M) - trigger_dilated_entropy(tree, profile)
    assert gradient.value == pytest.approx(expected, rel=1e-9)


def test_balanced_partition_is_conjugate_to_balanced_entropy():
    tree = random_tree(2, 3, 2, 2)
    weights = balanced_weights(tree)
    M = np.random.default_rng(3).random((tree.num_sequences, tree.num_sequences))
    gradient = log_partition_balanced(tree, M, weights=weights)
    profile = gradient.profile
    expected = -profile.inner(tree, M) - balanced_trigger_entropy(tree, profile, weights)
    assert gradient.value == pytest.approx(expected, rel=1e-9)


def test_trigger_kl_vanishes_only_at_the_reference():
    tree = random_tree(2, 3, 2, 2)
    weights = balanced_weights(tree)
    rng = np.random.default_rng(4)
    size = tree.num_sequences
    first = log_partition_trigger(tree, rng.random((size, size))).profile
    second = log_partition_trigger(tree, rng.random((size, size))).profile
    assert trigger_dilated_kl(tree, first, first) == pytest.approx(0.0, abs=1e-12)
    assert trigger_dilated_kl(tree, first, second) > 0.0
    assert balanced_trigger_kl(tree, first, second, weights) > 0.0
