from __future__ import annotations

from itertools import permutations

from .efg import EfgNode, ExtensiveGame, chance, decision, terminal

CARDS = ("J", "Q", "K")


def _showdown(mine: int, theirs: int, stake: float) -> EfgNode:
    return terminal(stake if mine > theirs else -stake)


def _deal(c0: int, c1: int) -> EfgNode:
    a, b = CARDS[c0], CARDS[c1]
    after_check = decision(
        1,
        f"P1:{b}:check",
        [
            ("check", _showdown(c0, c1, 1.0)),
            (
                "bet",
                decision(
                    0,
                    f"P0:{a}:check-bet",
                    [("fold", terminal(-1.0)), ("call", _showdown(c0, c1, 2.0))],
                ),
            ),
        ],
    )
    after_bet = decision(
        1,
        f"P1:{b}:bet",
        [("fold", terminal(1.0)), ("call", _showdown(c0, c1, 2.0))],
    )
    return decision(0, f"P0:{a}", [("check", after_check), ("bet", after_bet)])


def kuhn_poker() -> ExtensiveGame:
    """Three-card Kuhn poker with an ante of 1; payoffs are player 0's net chips.

    Player 0 acts first. Under the per-player reduction player 0 has three
    layer-1 infosets and H = 2 (the check branch is padded); player 1 has six
    layer-1 infosets and H = 1.
    """

    deals = list(permutations(range(len(CARDS)), 2))
    root = chance([(1.0 / len(deals), _deal(c0, c1)) for c0, c1 in deals])
    return ExtensiveGame(root=root, num_players=2, name="kuhn")


__all__ = ["kuhn_poker", "CARDS"]
