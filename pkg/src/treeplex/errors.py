from __future__ import annotations


class GameSpecError(ValueError):
    """Raised when a game description does not define a valid tree."""


class PolicyError(ValueError):
    """Raised when a vector or behavioral table is not a valid policy."""


class EnumerationCapExceeded(RuntimeError):
    def __init__(self, what: str, count: int, cap: int) -> None:
        super().__init__(f"{what}: {count} items exceeds the enumeration cap of {cap}")
        self.what = what
        self.count = count
        self.cap = cap


class FixedPointError(RuntimeError):
    def __init__(self, residual: float, tolerance: float) -> None:
        super().__init__(
            f"fixed point solve failed: residual {residual:.3e} above tolerance {tolerance:.1e}"
        )
        self.residual = residual
        self.tolerance = tolerance


class EstimatorError(RuntimeError):
    """Raised when an importance weight would divide by zero."""


class EpisodeError(RuntimeError):
    def __init__(self, episode: int, message: str) -> None:
        super().__init__(f"episode {episode}: {message}")
        self.episode = episode


__all__ = [
    "GameSpecError",
    "PolicyError",
    "EnumerationCapExceeded",
    "FixedPointError",
    "EstimatorError",
    "EpisodeError",
]
