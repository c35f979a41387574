from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Tuple

from ..errors import GameSpecError
from .efg import ExtensiveGame
from .environment import EpisodeEnvironment, environment_from_spec
from .generators import parse_generator
from .kuhn import kuhn_poker
from .tree import GameTree, build_game


@dataclass(frozen=True, eq=False)
class LoadedGame:
    """Either a tree-form game with an optional environment schedule, or an extensive-form game."""

    name: str
    tree: Optional[GameTree] = None
    schedule: Tuple[EpisodeEnvironment, ...] = field(default=())
    efg: Optional[ExtensiveGame] = None

    @property
    def is_efg(self) -> bool:
        return self.efg is not None


def load_game(source: str) -> LoadedGame:
    """Resolve ``kuhn``, a ``gen:random:...`` generator string, or a JSON game file."""

    if source == "kuhn":
        return LoadedGame(name="kuhn", efg=kuhn_poker())
    if source.startswith("gen:"):
        return LoadedGame(name=source, tree=parse_generator(source))
    path = Path(source)
    if not path.exists():
        raise GameSpecError(f"game file '{source}' does not exist")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GameSpecError(f"game file '{source}' is not valid JSON: {exc}") from exc
    return game_from_dict(data, name=path.stem)


def game_from_dict(data: Mapping[str, Any], name: str = "game") -> LoadedGame:
    if data.get("format") == "efg":
        game = ExtensiveGame.from_dict(data)
        return LoadedGame(name=str(data.get("name", name)), efg=game)
    tree = build_game(data)
    blocks = data.get("episodes")
    if blocks is None and any(k in data for k in ("initial", "transition", "reward")):
        blocks = [data]
    schedule = tuple(environment_from_spec(tree, block) for block in blocks or ())
    return LoadedGame(name=str(data.get("name", name)), tree=tree, schedule=schedule)


__all__ = ["LoadedGame", "load_game", "game_from_dict"]
