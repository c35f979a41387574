import json

import pytest

from treeplex.errors import GameSpecError
from treeplex.games.generators import parse_generator, random_tree
from treeplex.games.loader import game_from_dict, load_game
from treeplex.games.tree import build_game


def make_spec(**overrides):
    spec = {
        "layers": [["x1"], ["x2a", "x2b"]],
        "num_actions": 2,
        "children": {"x1,0": ["x2a"], "x1,1": ["x2b"]},
    }
    spec.update(overrides)
    return spec


def make_tree():
    return build_game(make_spec())


def test_single_infoset_tree_has_two_sequences():
    tree = build_game({"layers": [["root"]], "num_actions": 2})
    assert (tree.horizon, tree.num_infosets, tree.num_sequences) == (1, 1, 2)


def test_two_layer_tree_links_children_to_parent_sequences():
    tree = make_tree()
    assert tree.num_infosets == 3
    assert tree.num_sequences == 6
    assert tree.layer_sizes == (1, 2)
    x1 = tree.index("x1")
    assert tree.parent_seq[tree.index("x2a")] == tree.seq(x1, 0) == 0
    assert tree.parent_seq[tree.index("x2b")] == tree.seq(x1, 1) == 1
    assert tree.label(3) == "x2a:1"


def test_child_listed_under_two_sequences_is_rejected():
    spec = make_spec(children={"x1,0": ["x2a", "x2b"], "x1,1": ["x2a"]})
    with pytest.raises(GameSpecError, match="partition"):
        build_game(spec)


def test_orphan_infoset_is_rejected():
    with pytest.raises(GameSpecError, match="no parent"):
        build_game(make_spec(children={"x1,0": ["x2a"]}))


def test_dangling_child_is_rejected():
    with pytest.raises(GameSpecError, match="dangling"):
        build_game(make_spec(children={"x1,0": ["x2a", "ghost"], "x1,1": ["x2b"]}))


def test_cycle_back_to_the_root_is_rejected():
    children = {"x1,0": ["x2a"], "x1,1": ["x2b"], "x2a,0": ["x1"]}
    with pytest.raises(GameSpecError, match="cyclic"):
        build_game(make_spec(children=children))


def test_action_outside_range_is_rejected():
    with pytest.raises(GameSpecError, match="outside"):
        build_game(make_spec(children={"x1,0": ["x2a"], "x1,2": ["x2b"]}))


def test_succeq_marks_descendant_sequences():
    tree = make_tree()
    assert tree.succeq[0, 2] and tree.succeq[0, 3]
    assert not tree.succeq[0, 4]
    assert tree.succeq[1, 5]
    assert all(tree.succeq[j, j] for j in range(tree.num_sequences))


def test_is_full_detects_sequences_without_children():
    assert make_tree().is_full
    ragged = build_game(make_spec(children={"x1,0": ["x2a", "x2b"]}))
    assert not ragged.is_full


def test_spec_round_trip_preserves_structure():
    tree = random_tree(5, 3, (0, 2), 2)
    again = build_game(tree.to_spec())
    assert again.infoset_ids == tree.infoset_ids
    assert again.seq_children == tree.seq_children


def test_random_tree_is_reproducible_and_full_with_fixed_branching():
    tree = random_tree(0, 3, 2, 2)
    assert tree.layer_sizes == (1, 4, 16)
    assert tree.is_full
    assert random_tree(9, 3, (0, 2), 2).seq_children == random_tree(9, 3, (0, 2), 2).seq_children


def test_random_tree_respects_sequence_cap():
    with pytest.raises(GameSpecError, match="cap"):
        random_tree(0, 6, 3, 3)


def test_generator_strings():
    assert parse_generator("gen:random:3:2:1:2").layer_sizes == (1, 2)
    with pytest.raises(GameSpecError):
        parse_generator("gen:grid:3:2")


def test_load_game_sources(tmp_path):
    assert load_game("kuhn").is_efg
    assert load_game("gen:random:1:2:1:2").tree is not None
    path = tmp_path / "small.json"
    path.write_text(json.dumps(make_spec(episodes=[{"reward": {"x1,0": 0.5}}])), encoding="utf-8")
    loaded = load_game(str(path))
    assert loaded.name == "small"
    assert len(loaded.schedule) == 1
    assert loaded.schedule[0].mean_reward[0] == 0.5
    with pytest.raises(GameSpecError, match="does not exist"):
        load_game(str(tmp_path / "missing.json"))


def test_game_from_dict_reads_single_episode_blocks():
    loaded = game_from_dict(make_spec(transition={"x1,0": {"x2a": 1.0}}, reward={"x2b,1": 1.0}))
    env = loaded.schedule[0]
    tree = loaded.tree
    assert env.mean_reward[tree.seq(tree.index("x2b"), 1)] == 1.0
