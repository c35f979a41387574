import math

import numpy as np
import pytest

from treeplex.errors import PolicyError
from treeplex.games.policy import (
    balanced_behavioral,
    balanced_policies,
    balanced_policy,
    behavioral_to_seq,
    descendant_counts,
    flow_violation,
    random_policy,
    seq_to_behavioral,
    uniform_policy,
    validate_sequence,
)
from treeplex.games.generators import random_tree
from treeplex.games.tree import build_game


def make_tree():
    return build_game(
        {
            "layers": [["x1"], ["x2a", "x2b"]],
            "num_actions": 2,
            "children": {"x1,0": ["x2a"], "x1,1": ["x2b"]},
        }
    )


def make_lopsided_tree():
    # (x1, 0) leads to two infosets, (x1, 1) to one
    return build_game(
        {
            "layers": [["x1"], ["x2a", "x2b", "x2c"]],
            "num_actions": 2,
            "children": {"x1,0": ["x2a", "x2b"], "x1,1": ["x2c"]},
        }
    )


def test_uniform_policy_in_sequence_form():
    np.testing.assert_allclose(uniform_policy(make_tree()), [0.5, 0.5, 0.25, 0.25, 0.25, 0.25])


def test_behavioral_and_sequence_forms_invert_each_other():
    tree = random_tree(3, 3, 1, 2)
    mu = random_policy(tree, np.random.default_rng(0))
    validate_sequence(tree, mu)
    np.testing.assert_allclose(behavioral_to_seq(tree, seq_to_behavioral(tree, mu)), mu, atol=1e-12)


def test_zero_reach_infoset_gets_uniform_conditionals():
    tree = make_tree()
    beh = seq_to_behavioral(tree, np.array([1.0, 0.0, 0.3, 0.7, 0.0, 0.0]))
    np.testing.assert_allclose(beh[2], [0.5, 0.5])
    np.testing.assert_allclose(beh[1], [0.3, 0.7])


def test_validation_rejects_broken_flow_and_negative_entries():
    tree = make_tree()
    with pytest.raises(PolicyError, match="flow"):
        validate_sequence(tree, np.array([1.0, 0.0, 0.5, 0.2, 0.0, 0.0]))
    with pytest.raises(PolicyError, match="negative"):
        validate_sequence(tree, np.array([1.2, -0.2, 1.2, 0.0, -0.1, -0.1]))
    with pytest.raises(PolicyError, match="length"):
        validate_sequence(tree, np.ones(3))


def test_subtree_policy_is_zero_outside_its_root():
    tree = make_tree()
    sub = uniform_policy(tree, root=1)
    np.testing.assert_allclose(sub, [0.0, 0.0, 0.5, 0.5, 0.0, 0.0])
    assert flow_violation(tree, sub, root=1) == 0.0
    assert flow_violation(tree, sub) > 0.0


def test_behavioral_dict_input():
    tree = make_tree()
    mu = behavioral_to_seq(tree, {"x1": [1.0, 0.0], "x2a": [0.25, 0.75]})
    np.testing.assert_allclose(mu, [1.0, 0.0, 0.25, 0.75, 0.0, 0.0])


def test_descendant_counts_on_binary_tree():
    tree = make_tree()
    counts = descendant_counts(tree)
    assert counts.policy_l1 == 2
    assert math.isclose(math.exp(counts.log_num_policies), 4.0)
    assert counts.infoset_layer[0, 2] == 2
    assert counts.sequence_layer[0, 2] == 1
    assert list(counts.subtree_size) == [3, 1, 1]


def test_balanced_policy_follows_descendant_counts():
    tree = make_lopsided_tree()
    np.testing.assert_allclose(balanced_behavioral(tree, 2)[0], [2 / 3, 1 / 3])
    np.testing.assert_allclose(balanced_behavioral(tree, 1)[0], [0.5, 0.5])
    mu = balanced_policy(tree, 2)
    np.testing.assert_allclose(mu[2:6], [1 / 3] * 4)
    np.testing.assert_allclose(mu[6:8], [1 / 6] * 2)
    with pytest.raises(ValueError):
        balanced_behavioral(tree, 3)


def test_balancing_sum_equals_layer_size_times_actions():
    tree = make_lopsided_tree()
    star = balanced_policy(tree, 2)
    layer = tree.seq_layer == 2
    rng = np.random.default_rng(3)
    for _ in range(10):
        mu = random_policy(tree, rng)
        assert math.isclose(float((mu[layer] / star[layer]).sum()), 6.0, rel_tol=1e-12)
    assert star[layer].min() >= 1 / 6 - 1e-15


def test_balanced_trigger_weights():
    tree = make_lopsided_tree()
    policies = balanced_policies(tree)
    x2a = tree.index("x2a")
    assert math.isclose(policies.weight[x2a, 1], 1 / 3)
    assert math.isclose(policies.weight[x2a, 2], 0.5)
    assert policies.sequence.shape == (2, tree.num_sequences)
