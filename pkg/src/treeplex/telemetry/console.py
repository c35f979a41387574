from __future__ import annotations

import io
import json
import math
import os
import sys
import threading
from datetime import datetime
from typing import Any, Dict, Iterable

try:  # pragma: no cover - optional dependency import
    from rich.console import Console
    from rich.table import Table
except Exception:  # pragma: no cover - rich not installed
    Console = None  # type: ignore[assignment]
    Table = None  # type: ignore[assignment]

from .base import Events, TelemetrySink

_LOCK = threading.Lock()

RESET = "\x1b[0m"
BOLD = "\x1b[1m"
DIM = "\x1b[2m"
GREEN = "\x1b[32m"
RED = "\x1b[91m"
CYAN = "\x1b[36m"
YELLOW = "\x1b[33m"


def _fmt_ts(show_ts: bool) -> str:
    if not show_ts:
        return ""
    return f"{DIM}{datetime.now().isoformat(timespec='seconds')}{RESET} "


def _fmt_number(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return str(value)
        return f"{value:.6g}"
    return str(value)


def _safe_json(value: Any) -> str:
    try:
        return json.dumps(value, ensure_ascii=False, default=str)
    except Exception:
        return str(value)


class ConsoleTelemetrySink(TelemetrySink):
    """Colorized one-line-per-event logger for runs, sweeps and verification.

    Controlled by env vars:
      - TREEPLEX_CONSOLE_TIMESTAMPS: '1' to show timestamps (default 1)
      - TREEPLEX_CONSOLE_EPISODES: '1' to print every episode (default 0)
      - TREEPLEX_CONSOLE_TABLES: '0' to print metric rows as plain text even when rich is available
    """

    def __init__(self, stream: Any = None) -> None:
        self._stdout = stream if stream is not None else sys.stdout
        self._show_ts = os.getenv("TREEPLEX_CONSOLE_TIMESTAMPS", "1") != "0"
        self._show_episodes = os.getenv("TREEPLEX_CONSOLE_EPISODES", "0") == "1"
        self._rich_enabled = Console is not None and Table is not None
        self._tables = self._rich_enabled and os.getenv("TREEPLEX_CONSOLE_TABLES", "1") != "0"

    def emit(self, event: str, payload: dict | None = None) -> None:
        data: Dict[str, Any] = payload or {}
        prefix = _fmt_ts(self._show_ts)
        line: str | None = None

        if event == Events.RUN_STARTED:
            what = data.get("algorithm") or ",".join(data.get("algorithms", []))
            line = f"{prefix}{BOLD}{CYAN}▶ run{RESET} {what} T={data.get('T')}"
            if "eta" in data:
                line += f" eta={_fmt_number(data['eta'])} gamma={_fmt_number(data.get('gamma'))}"

        elif event == Events.EPISODE_COMPLETED:
            if not self._show_episodes:
                return
            body = " ".join(f"{k}={_fmt_number(v)}" for k, v in data.items())
            line = f"{prefix}{DIM}· {body}{RESET}"

        elif event == Events.METRICS_ROW:
            line = self._render_row(data, prefix)

        elif event == Events.RUN_COMPLETED:
            line = f"{prefix}{BOLD}{GREEN}■ done{RESET}"
            extras = {k: v for k, v in data.items() if k in {"trigger_regret", "efce_gap", "nash_gap", "t"}}
            if extras:
                line += " " + " ".join(f"{k}={_fmt_number(v)}" for k, v in extras.items())

        elif event == Events.RUN_FAILED:
            line = f"{prefix}{BOLD}{RED}✖ episode {data.get('episode')}{RESET} {data.get('error', '')}"

        elif event == Events.LEARNER_RESYNCED:
            line = f"{prefix}{YELLOW}↻ resync{RESET} t={data.get('t')} drift={_fmt_number(data.get('drift'))}"

        elif event == Events.FIXED_POINT_FALLBACK:
            line = f"{prefix}{YELLOW}⚠ fixed point{RESET} {data.get('solver')} residual={_fmt_number(data.get('residual'))}"

        elif event == Events.VERIFY_CHECK:
            mark = f"{GREEN}PASS{RESET}" if data.get("passed") else f"{RED}FAIL{RESET}"
            seconds = data.get("seconds")
            took = f" {DIM}({seconds:.1f}s){RESET}" if isinstance(seconds, float) else ""
            line = f"{prefix}{mark} {data.get('name')}: {data.get('detail')}{took}"

        elif event == Events.VERIFY_COMPLETED:
            verdict = f"{GREEN}all checks passed{RESET}" if data.get("passed") else f"{RED}checks failed{RESET}"
            line = f"{prefix}{BOLD}{verdict}"

        elif event in (Events.SWEEP_JOB_STARTED, Events.SWEEP_JOB_COMPLETED):
            arrow = "⇢" if event == Events.SWEEP_JOB_STARTED else "⇠"
            body = " ".join(f"{k}={_fmt_number(v)}" for k, v in data.items())
            line = f"{prefix}{CYAN}{arrow} sweep{RESET} {body}"

        if line is None:
            line = f"{prefix}{event} {_safe_json(data)}"

        with _LOCK:
            try:
                self._stdout.write(line + "\n")
                self._stdout.flush()
            except Exception:
                # Never let logging break the run
                pass

    def _render_row(self, data: Dict[str, Any], prefix: str) -> str:
        if self._tables and Console is not None and Table is not None:
            console = Console(file=io.StringIO(), force_terminal=True, width=120, highlight=False)
            table = Table(show_header=True, header_style="bold", box=None, pad_edge=False)
            for key in data:
                table.add_column(key, justify="right")
            table.add_row(*(_fmt_number(v) for v in data.values()))
            try:
                with console.capture() as capture:
                    console.print(table)
                return prefix + capture.get().rstrip()
            except Exception:
                pass
        return prefix + " ".join(f"{k}={_fmt_number(v)}" for k, v in data.items())


class MultiTelemetrySink(TelemetrySink):
    """Fan-out sink that emits to multiple sinks."""

    def __init__(self, sinks: Iterable[TelemetrySink]) -> None:
        self._sinks = list(sinks)

    def emit(self, event: str, payload: dict | None = None) -> None:
        for sink in self._sinks:
            try:
                sink.emit(event, payload)
            except Exception:
                # Best-effort; keep other sinks alive
                pass

    def build_bundle(
        self,
        *,
        config: Dict[str, Any],
        game: Dict[str, Any],
        metadata: Dict[str, Any] | None = None,
    ) -> Dict[str, Any]:
        for sink in self._sinks:
            build_bundle = getattr(sink, "build_bundle", None)
            if callable(build_bundle):
                return build_bundle(config=config, game=game, metadata=metadata)
        raise AttributeError("MultiTelemetrySink requires at least one sink that implements build_bundle")


__all__ = ["ConsoleTelemetrySink", "MultiTelemetrySink"]
