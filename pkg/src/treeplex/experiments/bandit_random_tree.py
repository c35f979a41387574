from __future__ import annotations

import statistics
from typing import Any, Dict, List, Optional

import anyio
from anyio import to_process
from pydantic import Field, field_validator

from ..games.loader import load_game
from ..harness.config import RunConfig
from ..harness.runner import execute
from ..learners.base import Algorithm, Feedback
from ..telemetry.base import Events, TelemetrySink, resolve_sink
from .base import BaseExperiment, ExperimentConfig, ExperimentResult

BANDIT_LEARNERS = (Algorithm.EFCE_OMD_INC, Algorithm.BALANCED_EFCE_OMD_INC)


def bandit_job(config_json: str) -> Dict[str, Any]:
    """Worker entry point: one bandit run, reduced to the regrets the comparison needs."""

    config = RunConfig.model_validate_json(config_json)
    outcome = execute(config)
    assert outcome.history is not None and outcome.hyper is not None
    rows = outcome.history.rows
    early = rows[0]
    final = rows[-1]
    return {
        "game": config.game,
        "algorithm": config.algorithm.value,
        "seed": config.seed,
        "early_t": early.t,
        "early_regret": early.trigger_regret,
        "regret": final.trigger_regret,
        "T": final.t,
        "bound": outcome.hyper.regret_bound,
    }


class BanditRandomTreeConfig(ExperimentConfig):
    game: str = "gen:random:7:3:1:2"
    wide_game: str = "gen:random:7:2:8:2"
    T: int = Field(default=100_000, ge=16)
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4])
    workers: Optional[int] = Field(default=None, ge=1)
    shrink: float = Field(default=0.5, gt=0.0)
    max_infosets: int = Field(default=20, ge=1)

    @field_validator("T")
    @classmethod
    def _divisible(cls, value: int) -> int:
        if value % 16:
            raise ValueError(f"T must be a multiple of 16, got {value}")
        return value


class BanditRandomTreeExperiment(BaseExperiment):
    slug = "bandit-random-tree"
    description = "Both bandit trigger learners on random trees over several seeds, plus a wide tree comparison."
    config_cls = BanditRandomTreeConfig

    async def run(self, config: BanditRandomTreeConfig, telemetry: Optional[TelemetrySink] = None) -> ExperimentResult:
        sink = resolve_sink(telemetry)
        for source in (config.game, config.wide_game):
            tree = load_game(source).tree
            if tree is None or tree.num_infosets > config.max_infosets:
                raise ValueError(f"'{source}' must be a tree with at most {config.max_infosets} infosets")

        jobs: List[RunConfig] = [
            RunConfig(game=game, algorithm=algo, feedback=Feedback.BANDIT, T=config.T, seed=seed, cadence=config.T // 16)
            for game in (config.game, config.wide_game)
            for algo in BANDIT_LEARNERS
            for seed in config.seeds
        ]
        limiter = anyio.CapacityLimiter(config.workers or len(jobs))
        results: List[Dict[str, Any]] = []

        async def job(run: RunConfig) -> None:
            sink.emit(Events.SWEEP_JOB_STARTED, {"game": run.game, "algorithm": run.algorithm.value, "seed": run.seed})
            summary = await to_process.run_sync(bandit_job, run.model_dump_json(), cancellable=True, limiter=limiter)
            results.append(summary)
            sink.emit(Events.SWEEP_JOB_COMPLETED, summary)

        async with anyio.create_task_group() as tg:
            for run in jobs:
                tg.start_soon(job, run)

        def select(game: str, algo: Algorithm) -> List[Dict[str, Any]]:
            return sorted(
                (r for r in results if r["game"] == game and r["algorithm"] == algo.value), key=lambda r: r["seed"]
            )

        per_learner: Dict[str, Dict[str, Any]] = {}
        checks: Dict[str, bool] = {}
        for algo in BANDIT_LEARNERS:
            runs = select(config.game, algo)
            late = statistics.median(r["regret"] / r["T"] for r in runs)
            early = statistics.median(r["early_regret"] / r["early_t"] for r in runs)
            per_learner[algo.value] = {
                "median_average_regret": late,
                "median_early_average_regret": early,
                "mean_regret": statistics.fmean(r["regret"] for r in runs),
                "runs": runs,
            }
            checks[f"{algo.value}:sublinear"] = late <= config.shrink * early
            bounded = [r["regret"] <= r["bound"] for r in runs if r["bound"] is not None]
            if bounded:
                checks[f"{algo.value}:within_bound"] = all(bounded)

        wide = {algo.value: statistics.fmean(r["regret"] for r in select(config.wide_game, algo)) for algo in BANDIT_LEARNERS}
        checks["balanced_wins_on_wide_tree"] = wide[Algorithm.BALANCED_EFCE_OMD_INC.value] <= wide[Algorithm.EFCE_OMD_INC.value]
        return ExperimentResult(
            metrics={"learners": per_learner, "wide_mean_regret": wide},
            metadata={"checks": checks, "game": config.game, "wide_game": config.wide_game, "T": config.T},
        )


__all__ = ["BanditRandomTreeExperiment", "BanditRandomTreeConfig", "bandit_job"]
