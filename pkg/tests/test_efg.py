import numpy as np
import pytest

from treeplex.errors import GameSpecError
from treeplex.feedback.losses import expected_loss
from treeplex.games.efg import (
    ExtensiveGame,
    expected_utilities,
    player_view,
    player_views,
    reduce_efg,
    simulate_episode,
)
from treeplex.games.kuhn import kuhn_poker
from treeplex.games.policy import random_policy, seq_to_behavioral, uniform_policy


def make_single_decision_game():
    return ExtensiveGame.from_dict(
        {
            "players": 1,
            "root": {
                "kind": "decision",
                "player": 0,
                "infoset": "a",
                "actions": [
                    {"name": "l", "node": {"kind": "terminal", "payoff": 1}},
                    {"name": "r", "node": {"kind": "terminal", "payoff": 0}},
                ],
            },
        }
    )


def test_kuhn_player_views_have_expected_shapes():
    first, second = player_views(kuhn_poker())
    assert (first.tree.num_infosets, first.tree.num_actions, first.tree.horizon) == (9, 2, 2)
    assert first.tree.layer_sizes == (3, 6)
    assert (second.tree.num_infosets, second.tree.horizon) == (6, 1)
    assert first.payoff_range == (-2.0, 2.0)
    assert "P0:J|check|end" in first.tree.infoset_ids
    assert len(first.decision_infosets) == 6


def test_single_decision_game_reduces_to_its_payoffs():
    game = make_single_decision_game()
    env = reduce_efg(game, 0)
    np.testing.assert_allclose(expected_loss(env), [0.0, 1.0])


def test_reduced_loss_reproduces_expected_payoff():
    game = kuhn_poker()
    views = player_views(game)
    rng = np.random.default_rng(11)
    mus = [random_policy(view.tree, rng) for view in views]
    maps = [view.behavioral_map(mu) for view, mu in zip(views, mus)]
    direct = expected_utilities(game, maps)
    assert direct[0] == pytest.approx(-direct[1])
    for i, view in enumerate(views):
        env = reduce_efg(game, i, opponent_policies=maps[1 - i], view=view)
        via_loss = view.utility_from_loss(float(mus[i] @ expected_loss(env)))
        assert via_loss == pytest.approx(direct[i], abs=1e-12)


def test_reduced_environment_rows_are_distributions():
    game = kuhn_poker()
    env = reduce_efg(game, 0)
    tree = env.tree
    assert env.initial.sum() == pytest.approx(1.0)
    for j, kids in enumerate(tree.seq_children):
        if kids:
            assert env.transition[j].sum() == pytest.approx(1.0)
    assert env.unreachable == ()


def test_simulated_episode_trajectories_follow_each_view():
    game = kuhn_poker()
    views = player_views(game)
    behaviors = [seq_to_behavioral(v.tree, uniform_policy(v.tree)) for v in views]
    rng = np.random.default_rng(0)
    for _ in range(50):
        first, second = simulate_episode(game, views, behaviors, rng)
        first.check(views[0].tree)
        second.check(views[1].tree)
        assert len(second) == 1
        assert 1 <= len(first) <= 2
        assert first.steps[-1].reward + second.steps[-1].reward == pytest.approx(1.0)


def test_player_without_decisions_is_rejected():
    with pytest.raises(GameSpecError, match="never acts"):
        player_view(make_single_decision_game(), 1)


def make_opponent_first_game():
    return ExtensiveGame.from_dict(
        {
            "root": {
                "kind": "decision",
                "player": 1,
                "infoset": "o",
                "actions": [
                    {"name": "quit", "node": {"kind": "terminal", "payoff": 0}},
                    {
                        "name": "play",
                        "node": {
                            "kind": "decision",
                            "player": 0,
                            "infoset": "p",
                            "actions": [
                                {"name": "l", "node": {"kind": "terminal", "payoff": 1}},
                                {"name": "r", "node": {"kind": "terminal", "payoff": -1}},
                            ],
                        },
                    },
                ],
            },
        }
    )


def test_reduction_when_the_opponent_ends_the_game_first():
    game = make_opponent_first_game()
    view = player_view(game, 0)
    tree = view.tree
    env = reduce_efg(game, 0, {"o": [1.0, 0.0]}, view=view)
    start = tree.index(view.pad_of[None])
    assert env.initial[tree.index("p")] == 0.0
    assert env.initial[start] == pytest.approx(1.0)
    A = tree.num_actions
    assert set(env.unreachable) == {tree.index("p") * A + a for a in range(A)}
    assert np.all(np.isfinite(expected_loss(env)))
    np.testing.assert_allclose(env.mean_reward[start * A : (start + 1) * A], 0.5)
