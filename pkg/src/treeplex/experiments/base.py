from __future__ import annotations

import abc
from typing import Any, Dict, Optional, Type

from pydantic import BaseModel, Field

from ..telemetry.base import TelemetrySink


class ExperimentResult(BaseModel):
    metrics: Dict[str, Any]
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        checks = self.metadata.get("checks", {})
        return all(bool(v) for v in checks.values())


class ExperimentConfig(BaseModel):
    seed: int = Field(default=0, ge=0)


class BaseExperiment(abc.ABC):
    slug: str
    description: str
    config_cls: Type[ExperimentConfig] = ExperimentConfig

    def parse_config(self, **values: Any) -> ExperimentConfig:
        return self.config_cls(**values)

    @abc.abstractmethod
    async def run(
        self, config: ExperimentConfig, telemetry: Optional[TelemetrySink] = None
    ) -> ExperimentResult:  # pragma: no cover - interface
        ...


__all__ = ["BaseExperiment", "ExperimentConfig", "ExperimentResult"]
