from __future__ import annotations

from typing import Optional

from anyio import to_thread
from pydantic import Field

from ..games.kuhn import kuhn_poker
from ..harness.config import RunConfig
from ..harness.runner import run_self_play
from ..learners.base import Algorithm, Feedback
from ..telemetry.base import TelemetrySink
from .base import BaseExperiment, ExperimentConfig, ExperimentResult


class SelfPlayKuhnConfig(ExperimentConfig):
    algorithm: Algorithm = Algorithm.EFCE_OMD
    feedback: Feedback = Feedback.FULL
    T: int = Field(default=4096, ge=1)
    tolerance: float = Field(default=1e-8, gt=0.0)


class SelfPlayKuhnExperiment(BaseExperiment):
    slug = "self-play-kuhn"
    description = "Uncoupled self-play on Kuhn poker; the empirical EFCE gap equals the largest average trigger regret."
    config_cls = SelfPlayKuhnConfig

    async def run(self, config: SelfPlayKuhnConfig, telemetry: Optional[TelemetrySink] = None) -> ExperimentResult:
        run = RunConfig(game="kuhn", algorithm=config.algorithm, feedback=config.feedback, T=config.T, seed=config.seed, players=2)
        joint = await to_thread.run_sync(lambda: run_self_play([run], kuhn_poker(), telemetry=telemetry))
        last = joint.rows[-1]
        assert joint.efce_gap is not None
        identity_error = abs(joint.efce_gap - max(0.0, last.regret_gap))
        checks = {
            "online_to_batch": identity_error <= config.tolerance,
            "gap_shrinks": joint.rows[0].regret_gap >= last.regret_gap,
        }
        return ExperimentResult(
            metrics={
                "efce_gap": joint.efce_gap,
                "regret_gap": last.regret_gap,
                "nfcce_gap": last.nfcce_gap,
                "nash_gap": joint.nash_gap,
                "value_0": last.value_0,
                "identity_error": identity_error,
                "rows": [row.as_dict() for row in joint.rows],
            },
            metadata={"checks": checks, "T": config.T, "algorithm": config.algorithm.value},
        )


__all__ = ["SelfPlayKuhnExperiment", "SelfPlayKuhnConfig"]
