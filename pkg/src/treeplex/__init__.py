"""Treeplex: no-regret learning and correlated equilibria in tree-form games.

Loads environment variables from a local `.env` file if present so
``TREEPLEX_*`` run overrides can live next to the project.
"""

# Best-effort .env loading (does nothing if python-dotenv is missing)
try:  # pragma: no cover - side-effect convenience
    from dotenv import load_dotenv

    load_dotenv()
except Exception:  # noqa: BLE001 - ignore missing dotenv or any load issues
    pass

from .games.tree import GameTree, build_game
from .harness.config import RunConfig
from .harness.runner import execute
from .learners.registry import build_learner

__all__ = [
    "GameTree",
    "build_game",
    "RunConfig",
    "execute",
    "build_learner",
]
