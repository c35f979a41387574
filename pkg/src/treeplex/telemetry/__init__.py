"""Run event sinks: structured bundles, console rendering and fan-out."""

from .base import Events, NullTelemetrySink, TelemetrySink, resolve_sink
from .console import ConsoleTelemetrySink, MultiTelemetrySink
from .recorder import StructuredTelemetrySink, TelemetryEvent

__all__ = [
    "Events",
    "TelemetrySink",
    "NullTelemetrySink",
    "resolve_sink",
    "ConsoleTelemetrySink",
    "MultiTelemetrySink",
    "StructuredTelemetrySink",
    "TelemetryEvent",
]
