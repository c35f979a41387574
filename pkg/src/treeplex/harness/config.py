from __future__ import annotations

import math
import os
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator
from typing_extensions import Self

from ..learners.base import Algorithm, Feedback
from ..learners.hyperparams import DEFAULT_DELTA, DEFAULT_ETA_CONSTANT
from ..triggers.vertices import DEFAULT_ENUMERATION_CAP

ENV_PREFIX = "TREEPLEX_"
POW2 = "pow2"


class Opponent(str, Enum):
    UNIFORM = "uniform"
    BEST_RESPONSE = "best-response"


class RunConfig(BaseModel):
    """Everything a single run needs; ``from_env`` layers ``TREEPLEX_*`` variables under explicit values."""

    game: str = "kuhn"
    algorithm: Algorithm = Algorithm.EFCE_OMD
    feedback: Feedback = Feedback.FULL
    T: int = Field(default=256, ge=1)
    eta: Optional[float] = Field(default=None, gt=0.0)
    gamma: Optional[float] = Field(default=None, ge=0.0)
    delta: float = Field(default=DEFAULT_DELTA, gt=0.0, lt=1.0)
    eta_constant: float = Field(default=DEFAULT_ETA_CONSTANT, gt=0.0)
    seed: int = Field(default=0, ge=0)
    players: int = Field(default=1, ge=1, le=2)
    player: int = Field(default=0, ge=0, le=1)
    out_dir: Optional[str] = None
    cadence: Union[int, str] = POW2
    trajectory_log: bool = False
    resync_every: int = Field(default=0, ge=0)
    enumeration_cap: int = Field(default=DEFAULT_ENUMERATION_CAP, ge=1)
    opponent: Opponent = Opponent.UNIFORM

    @field_validator("cadence", mode="before")
    @classmethod
    def _parse_cadence(cls, value: Any) -> Union[int, str]:
        if isinstance(value, str):
            value = value.strip().lower()
            if value == POW2:
                return POW2
            if not value.isdigit():
                raise ValueError(f"cadence must be '{POW2}' or a positive integer, got '{value}'")
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ValueError(f"cadence must be '{POW2}' or a positive integer, got {value!r}")
        return value

    @model_validator(mode="after")
    def _check_cadence_divides(self) -> Self:
        if isinstance(self.cadence, int) and self.T % self.cadence != 0:
            raise ValueError(f"cadence {self.cadence} does not divide T={self.T}")
        return self

    def cadence_points(self) -> List[int]:
        return cadence_points(self.T, self.cadence)

    @classmethod
    def from_env(cls, overrides: Optional[Mapping[str, Any]] = None, environ: Optional[Mapping[str, str]] = None) -> Self:
        """Precedence: explicit ``overrides`` (None values skipped) > ``TREEPLEX_<FIELD>`` > defaults."""

        env = os.environ if environ is None else environ
        values: Dict[str, Any] = {}
        for name in cls.model_fields:
            raw = env.get(ENV_PREFIX + name.upper())
            if raw is not None and raw != "":
                values[name] = raw.strip()
        for name, value in (overrides or {}).items():
            if value is not None:
                values[name] = value
        return cls(**values)


def cadence_points(T: int, cadence: Union[int, str] = POW2) -> List[int]:
    """Episode counts at which metrics are recorded; always ends at T."""

    if cadence == POW2:
        points = [2**k for k in range(int(math.floor(math.log2(T))) + 1)]
        if points[-1] != T:
            points.append(T)
        return points
    step = int(cadence)
    return list(range(step, T + 1, step))


__all__ = ["RunConfig", "Opponent", "cadence_points", "ENV_PREFIX", "POW2"]
