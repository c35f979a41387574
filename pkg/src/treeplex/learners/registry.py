from __future__ import annotations

from typing import Any, Dict, Iterable, Optional, Type

from ..games.tree import GameTree
from ..telemetry.base import TelemetrySink
from ..triggers.vertices import DEFAULT_ENUMERATION_CAP
from .base import Algorithm, BaseLearner
from .efce_omd import BalancedEfceOmd, BalancedEfceOmdIncremental, EfceOmd, EfceOmdIncremental
from .hyperparams import HyperParameters
from .phi_hedge import PhiHedge
from .vertex import DilatedOmd, DilatedOmdIncremental, VertexMwu


class LearnerRegistry:
    def __init__(self) -> None:
        self._learners: Dict[Algorithm, Type[BaseLearner]] = {}
        for cls in (
            PhiHedge,
            EfceOmd,
            EfceOmdIncremental,
            BalancedEfceOmd,
            BalancedEfceOmdIncremental,
            VertexMwu,
            DilatedOmd,
            DilatedOmdIncremental,
        ):
            self.register(cls)

    def register(self, cls: Type[BaseLearner]) -> None:
        if cls.algorithm in self._learners:
            raise ValueError(f"Learner {cls.algorithm.value} already registered")
        self._learners[cls.algorithm] = cls

    def get(self, algorithm: Algorithm | str) -> Type[BaseLearner]:
        key = Algorithm(algorithm)
        if key not in self._learners:
            raise KeyError(f"Learner '{key.value}' not found")
        return self._learners[key]

    def list(self) -> Iterable[str]:
        return sorted(algorithm.value for algorithm in self._learners)

    def build(
        self,
        algorithm: Algorithm | str,
        tree: GameTree,
        hyper: HyperParameters,
        *,
        telemetry: Optional[TelemetrySink] = None,
        resync_every: int = 0,
        enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    ) -> BaseLearner:
        cls = self.get(algorithm)
        options: Dict[str, Any] = {}
        if getattr(cls, "incremental", False):
            options["resync_every"] = resync_every
        if getattr(cls, "enumerates", False):
            options["enumeration_cap"] = enumeration_cap
        return cls(tree, eta=hyper.eta, gamma=hyper.gamma, telemetry=telemetry, **options)


_DEFAULT_REGISTRY: Optional[LearnerRegistry] = None


def build_learner(
    algorithm: Algorithm | str,
    tree: GameTree,
    hyper: HyperParameters,
    **options: Any,
) -> BaseLearner:
    global _DEFAULT_REGISTRY
    if _DEFAULT_REGISTRY is None:
        _DEFAULT_REGISTRY = LearnerRegistry()
    return _DEFAULT_REGISTRY.build(algorithm, tree, hyper, **options)


__all__ = ["LearnerRegistry", "build_learner"]
