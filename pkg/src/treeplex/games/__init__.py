"""Tree-form decision problems, policies, environments and the extensive-form reduction."""

from .efg import (
    EfgNode,
    ExtensiveGame,
    PlayerView,
    expected_utilities,
    player_view,
    player_views,
    reduce_efg,
    simulate_episode,
)
from .environment import (
    EpisodeEnvironment,
    RewardKind,
    Step,
    Trajectory,
    environment_from_spec,
    random_environment,
    uniform_environment,
)
from .generators import parse_generator, random_tree
from .kuhn import kuhn_poker
from .loader import LoadedGame, game_from_dict, load_game
from .policy import (
    BalancedPolicies,
    DescendantCounts,
    SequencePolicy,
    balanced_behavioral,
    balanced_policies,
    balanced_policy,
    behavioral_to_seq,
    descendant_counts,
    random_policy,
    seq_to_behavioral,
    uniform_policy,
    validate_sequence,
)
from .tree import GameTree, build_game

__all__ = [
    "GameTree",
    "build_game",
    "SequencePolicy",
    "seq_to_behavioral",
    "behavioral_to_seq",
    "validate_sequence",
    "uniform_policy",
    "random_policy",
    "DescendantCounts",
    "descendant_counts",
    "balanced_behavioral",
    "balanced_policy",
    "BalancedPolicies",
    "balanced_policies",
    "EpisodeEnvironment",
    "RewardKind",
    "Step",
    "Trajectory",
    "uniform_environment",
    "random_environment",
    "environment_from_spec",
    "random_tree",
    "parse_generator",
    "EfgNode",
    "ExtensiveGame",
    "PlayerView",
    "player_view",
    "player_views",
    "reduce_efg",
    "simulate_episode",
    "expected_utilities",
    "kuhn_poker",
    "LoadedGame",
    "load_game",
    "game_from_dict",
]
