import numpy as np
import pytest

from treeplex.errors import EnumerationCapExceeded, PolicyError
from treeplex.games.generators import random_tree
from treeplex.games.policy import random_policy, validate_sequence
from treeplex.games.tree import build_game
from treeplex.triggers import (
    TriggerProfile,
    apply_trigger_vertex,
    best_trigger_response,
    best_vertex_response,
    count_trigger_vertices,
    enumerate_policies,
    enumerate_trigger_vertices,
    fixed_point,
    fixed_point_residual,
    profile_apply,
    profile_from_vertices,
    profile_inner,
    profile_matrix,
    trigger_regret_from_cumulative,
)


def make_tree():
    return build_game(
        {
            "layers": [["x1"], ["x2a", "x2b"]],
            "num_actions": 2,
            "children": {"x1,0": ["x2a"], "x1,1": ["x2b"]},
        }
    )


def make_profile(tree, rng):
    XA, A = tree.num_sequences, tree.num_actions
    m = np.column_stack([random_policy(tree, rng, root=j // A) for j in range(XA)])
    return TriggerProfile(lam=rng.dirichlet(np.ones(XA)), m=m)


def test_single_infoset_tree_has_four_trigger_vertices():
    tree = build_game({"layers": [["root"]], "num_actions": 2})
    assert count_trigger_vertices(tree) == 4
    assert len(enumerate_trigger_vertices(tree)) == 4


def test_vertex_counts_on_depth_two_tree():
    tree = make_tree()
    assert len(enumerate_policies(tree)) == 4
    assert count_trigger_vertices(tree) == 16
    assert len(enumerate_trigger_vertices(tree)) == 16


def test_enumeration_cap_is_enforced():
    with pytest.raises(EnumerationCapExceeded) as exc:
        enumerate_trigger_vertices(make_tree(), cap=3)
    assert exc.value.count == 16


def test_vertex_action_matches_its_matrix():
    tree = random_tree(2, 3, (1, 2), 2)
    rng = np.random.default_rng(1)
    mu = random_policy(tree, rng)
    for vertex in enumerate_trigger_vertices(tree):
        np.testing.assert_allclose(apply_trigger_vertex(tree, vertex, mu), vertex.matrix(tree) @ mu, atol=1e-14)


def test_unplayed_trigger_leaves_policy_unchanged():
    tree = make_tree()
    mu = np.array([1.0, 0.0, 1.0, 0.0, 0.0, 0.0])
    for vertex in enumerate_trigger_vertices(tree):
        if vertex.trigger == 1:
            np.testing.assert_array_equal(apply_trigger_vertex(tree, vertex, mu), mu)


def test_profile_forms_agree():
    tree = random_tree(4, 3, (1, 2), 2)
    rng = np.random.default_rng(2)
    profile = make_profile(tree, rng)
    profile.validate(tree)
    v = rng.random(tree.num_sequences)
    M = rng.random((tree.num_sequences, tree.num_sequences))
    np.testing.assert_allclose(profile_matrix(tree, profile) @ v, profile_apply(tree, profile, v), atol=1e-12)
    assert profile_inner(tree, profile, M) == pytest.approx(float(np.sum(profile_matrix(tree, profile) * M)))


def test_profile_from_vertices_averages_vertex_matrices():
    tree = make_tree()
    vertices = enumerate_trigger_vertices(tree)
    weights = np.random.default_rng(3).dirichlet(np.ones(len(vertices)))
    profile = profile_from_vertices(tree, vertices, weights)
    profile.validate(tree)
    expected = sum(w * v.matrix(tree) for w, v in zip(weights, vertices))
    np.testing.assert_allclose(profile_matrix(tree, profile), expected, atol=1e-12)


def test_invalid_lambda_is_rejected():
    tree = make_tree()
    profile = make_profile(tree, np.random.default_rng(4))
    bad = TriggerProfile(lam=profile.lam * 2.0, m=profile.m)
    with pytest.raises(PolicyError, match="lambda"):
        bad.validate(tree)


def test_fixed_point_is_a_valid_policy():
    rng = np.random.default_rng(5)
    for seed in range(3):
        tree = random_tree(seed, 3, (1, 2), 3)
        profile = make_profile(tree, rng)
        mu = fixed_point(tree, profile)
        validate_sequence(tree, mu)
        assert fixed_point_residual(tree, profile, mu) <= 1e-10


def test_best_trigger_response_matches_enumeration():
    tree = random_tree(6, 3, (1, 2), 2)
    vertices = enumerate_trigger_vertices(tree)
    matrices = [v.matrix(tree) for v in vertices]
    rng = np.random.default_rng(6)
    for _ in range(20):
        C = rng.random((tree.num_sequences, tree.num_sequences)) * 5.0
        brute = min(float(np.sum(Phi * C)) for Phi in matrices)
        response = best_trigger_response(tree, C)
        assert response.value == pytest.approx(brute, abs=1e-9)
        assert float(np.sum(response.vertex.matrix(tree) * C)) == pytest.approx(brute, abs=1e-9)
        assert trigger_regret_from_cumulative(tree, C) == pytest.approx(np.trace(C) - brute, abs=1e-9)


def test_best_vertex_response_matches_enumeration():
    tree = random_tree(7, 3, (1, 2), 2)
    policies = enumerate_policies(tree)
    rng = np.random.default_rng(7)
    for _ in range(20):
        loss = rng.random(tree.num_sequences)
        policy, value = best_vertex_response(tree, loss)
        assert value == pytest.approx(min(float(v @ loss) for v in policies), abs=1e-12)
        assert float(policy @ loss) == pytest.approx(value, abs=1e-12)
