from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List

from .base import Events, TelemetrySink


@dataclass
class TelemetryEvent:
    seq: int
    event: str
    ts: str
    payload: Dict[str, Any]

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


class StructuredTelemetrySink(TelemetrySink):
    """Collects run events for export as a JSON bundle next to the metric CSVs."""

    SCHEMA_VERSION = 1

    def __init__(self, *, keep_episodes: bool = False) -> None:
        self._events: List[TelemetryEvent] = []
        self._metrics: List[Dict[str, Any]] = []
        self._keep_episodes = keep_episodes

    def emit(self, event: str, payload: dict | None = None) -> None:
        data = dict(payload or {})
        if event == Events.METRICS_ROW:
            self._metrics.append(data)
        if event == Events.EPISODE_COMPLETED and not self._keep_episodes:
            return
        seq = len(self._events)
        ts = datetime.now(timezone.utc).isoformat()
        self._events.append(TelemetryEvent(seq=seq, event=event, ts=ts, payload=data))

    @property
    def events(self) -> Iterable[TelemetryEvent]:
        return tuple(self._events)

    @property
    def metrics(self) -> List[Dict[str, Any]]:
        return list(self._metrics)

    def build_bundle(
        self,
        *,
        config: Dict[str, Any],
        game: Dict[str, Any],
        metadata: Dict[str, Any] | None = None,
    ) -> Dict[str, Any]:
        digest = hashlib.sha256(json.dumps(config, sort_keys=True).encode("utf-8")).hexdigest()
        return {
            "bundle_type": "treeplex/run#events",
            "schema_version": self.SCHEMA_VERSION,
            "exported_at": datetime.now(timezone.utc).isoformat(),
            "config": config,
            "config_sha256": digest,
            "game": game,
            "metadata": dict(metadata or {}),
            "metrics": self.metrics,
            "events": [event.as_dict() for event in self._events],
        }


__all__ = ["StructuredTelemetrySink", "TelemetryEvent"]
