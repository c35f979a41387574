from __future__ import annotations

from typing import Any, Dict, Optional, Protocol


class Events:
    """Dotted event names emitted by runs, sweeps and the verifier."""

    RUN_STARTED = "run.started"
    EPISODE_COMPLETED = "episode.completed"
    METRICS_ROW = "metrics.row"
    RUN_COMPLETED = "run.completed"
    RUN_FAILED = "run.failed"
    LEARNER_RESYNCED = "learner.resynced"
    VERIFY_CHECK = "verify.check"
    VERIFY_COMPLETED = "verify.completed"
    SWEEP_JOB_STARTED = "sweep.job.started"
    SWEEP_JOB_COMPLETED = "sweep.job.completed"
    FIXED_POINT_FALLBACK = "fixed_point.fallback"


class TelemetrySink(Protocol):
    def emit(self, event: str, payload: Dict[str, Any] | None = None) -> None:  # pragma: no cover - Protocol
        ...


class NullTelemetrySink:
    def emit(self, event: str, payload: Dict[str, Any] | None = None) -> None:
        return None


def resolve_sink(sink: Optional[TelemetrySink]) -> TelemetrySink:
    return sink if sink is not None else NullTelemetrySink()


__all__ = ["Events", "TelemetrySink", "NullTelemetrySink", "resolve_sink"]
