"""Independent (config, seed) runs fanned out to worker processes."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import anyio
from anyio import to_process

from ..telemetry.base import Events, TelemetrySink, resolve_sink
from ..telemetry.recorder import StructuredTelemetrySink
from .config import RunConfig
from .emit import write_outcome
from .runner import execute


def run_job(config_json: str) -> Dict[str, Any]:
    """Worker entry point: run one config and write its artifacts; returns the summary."""

    config = RunConfig.model_validate_json(config_json)
    recorder = StructuredTelemetrySink()
    outcome = execute(config, telemetry=recorder)
    directory = config.out_dir or f"runs/seed-{config.seed}"
    return write_outcome(outcome, directory, recorder=recorder)


def seed_configs(base: RunConfig, seeds: Sequence[int], out_root: Optional[str] = None) -> List[RunConfig]:
    root = Path(out_root or base.out_dir or "runs")
    return [base.model_copy(update={"seed": seed, "out_dir": str(root / f"seed-{seed}")}) for seed in seeds]


async def run_sweep(
    base: RunConfig,
    seeds: Sequence[int],
    *,
    out_root: Optional[str] = None,
    workers: Optional[int] = None,
    telemetry: Optional[TelemetrySink] = None,
) -> List[Dict[str, Any]]:
    """Run ``base`` once per seed in parallel; results come back in seed order."""

    if not seeds:
        raise ValueError("sweep needs at least one seed")
    if len(set(seeds)) != len(seeds):
        raise ValueError("sweep seeds must be unique")
    sink = resolve_sink(telemetry)
    limiter = anyio.CapacityLimiter(workers or os.cpu_count() or 1)
    configs = seed_configs(base, seeds, out_root)
    results: Dict[int, Dict[str, Any]] = {}

    async def job(config: RunConfig) -> None:
        sink.emit(Events.SWEEP_JOB_STARTED, {"seed": config.seed, "out_dir": config.out_dir})
        summary = await to_process.run_sync(run_job, config.model_dump_json(), cancellable=True, limiter=limiter)
        results[config.seed] = summary
        sink.emit(
            Events.SWEEP_JOB_COMPLETED,
            {k: summary.get(k) for k in ("seed", "t", "trigger_regret", "efce_gap") if k in summary},
        )

    async with anyio.create_task_group() as tg:
        for config in configs:
            tg.start_soon(job, config)
    return [results[seed] for seed in seeds]


__all__ = ["run_job", "run_sweep", "seed_configs"]
