from __future__ import annotations

import math
from typing import Any, Dict, List, Optional

from anyio import to_thread
from pydantic import Field

from ..games.efg import player_views
from ..games.kuhn import kuhn_poker
from ..games.policy import descendant_counts
from ..harness.config import Opponent, RunConfig
from ..harness.runner import efg_schedule, run_adversarial
from ..learners.base import Algorithm, Feedback
from ..telemetry.base import TelemetrySink, resolve_sink
from .base import BaseExperiment, ExperimentConfig, ExperimentResult


class FullFeedbackKuhnConfig(ExperimentConfig):
    algorithm: Algorithm = Algorithm.EFCE_OMD
    player: int = Field(default=0, ge=0, le=1)
    min_log2_T: int = Field(default=8, ge=1)
    max_log2_T: int = Field(default=14, ge=1)
    growth_limit: float = Field(default=1.7, gt=1.0)
    growth_from_log2_T: int = 10
    bound_constant: float = Field(default=10.0, gt=0.0)


class FullFeedbackKuhnExperiment(BaseExperiment):
    slug = "full-feedback-kuhn"
    description = "Trigger regret of a full-feedback learner on Kuhn poker against a best-responding opponent, over T doublings."
    config_cls = FullFeedbackKuhnConfig

    async def run(self, config: FullFeedbackKuhnConfig, telemetry: Optional[TelemetrySink] = None) -> ExperimentResult:
        if config.max_log2_T < config.min_log2_T:
            raise ValueError("max_log2_T must be at least min_log2_T")
        sink = resolve_sink(telemetry)
        game = kuhn_poker()
        views = player_views(game)
        tree = views[config.player].tree
        points: List[Dict[str, Any]] = []
        for k in range(config.min_log2_T, config.max_log2_T + 1):
            # each horizon gets its own tuned learning rate
            run = RunConfig(
                game="kuhn",
                algorithm=config.algorithm,
                feedback=Feedback.FULL,
                T=2**k,
                seed=config.seed,
                player=config.player,
                opponent=Opponent.BEST_RESPONSE,
                cadence=2**k,
            )
            schedule = efg_schedule(game, config.player, Opponent.BEST_RESPONSE, views)
            history = await to_thread.run_sync(
                lambda: run_adversarial(run, tree, schedule, telemetry=sink)
            )
            row = history.rows[-1]
            points.append({"T": row.t, "trigger_regret": row.trigger_regret, "average": row.trigger_regret / row.t})

        counts = descendant_counts(tree)
        H, XA = tree.horizon, tree.num_sequences
        T_max = points[-1]["T"]
        bound = config.bound_constant * math.sqrt(H**2 * counts.policy_l1 * math.log(XA) * T_max)
        ratios = [
            (b["T"], b["trigger_regret"] / a["trigger_regret"] if a["trigger_regret"] > 0 else 0.0)
            for a, b in zip(points, points[1:])
        ]
        averages = [p["average"] for p in points]
        checks = {
            "average_decreasing": all(b < a for a, b in zip(averages, averages[1:])),
            "growth_bounded": all(
                r <= config.growth_limit for T, r in ratios if T // 2 >= 2**config.growth_from_log2_T
            ),
            "within_bound": points[-1]["trigger_regret"] <= bound,
        }
        return ExperimentResult(
            metrics={"points": points, "growth": [r for _, r in ratios], "bound": bound},
            metadata={"checks": checks, "infosets": tree.num_infosets, "policy_l1": counts.policy_l1},
        )


__all__ = ["FullFeedbackKuhnExperiment", "FullFeedbackKuhnConfig"]
