from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from ..learners.base import LearnerSnapshot
from .config import RunConfig
from ..telemetry.recorder import StructuredTelemetrySink
from .history import JointHistory, JointRow, MetricRow, RunHistory
from .runner import RunOutcome

PathLike = Union[str, Path]

METRIC_COLUMNS = ["t", "cum_loss", "trigger_regret", "external_regret", "regret_over_sqrt_t", "residual"]
JOINT_COLUMNS = ["t", "regret_gap", "nfcce_gap", "value_0", "value_1"]


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_rows(path: Path, columns: Sequence[str], rows: Sequence[Dict[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns))
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _format(row.get(key)) for key in columns})
    return path


def emit_metrics(history: RunHistory, path: PathLike) -> Path:
    """Write the cadence rows of ``history``; floats are written with ``repr`` so they read back exactly."""

    return _write_rows(Path(path), METRIC_COLUMNS, [row.as_dict() for row in history.rows])


def emit_joint_metrics(joint: JointHistory, directory: PathLike) -> List[Path]:
    """``joint.csv`` plus one ``player<i>.csv`` per player, and a ``summary.json`` with the final gaps."""

    directory = Path(directory)
    written = [_write_rows(directory / "joint.csv", JOINT_COLUMNS, [row.as_dict() for row in joint.rows])]
    for i, history in enumerate(joint.players):
        written.append(emit_metrics(history, directory / f"player{i}.csv"))
    summary = directory / "summary.json"
    summary.write_text(
        json.dumps({"efce_gap": joint.efce_gap, "nash_gap": joint.nash_gap, "T": joint.t}, indent=2),
        encoding="utf-8",
    )
    written.append(summary)
    return written


def read_metrics(path: PathLike) -> List[MetricRow]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        return [
            MetricRow(
                t=int(row["t"]),
                cum_loss=float(row["cum_loss"]),
                trigger_regret=float(row["trigger_regret"]),
                external_regret=float(row["external_regret"]),
                regret_over_sqrt_t=float(row["regret_over_sqrt_t"]),
                residual=float(row["residual"]),
            )
            for row in csv.DictReader(handle)
        ]


def read_joint_metrics(path: PathLike) -> List[JointRow]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        return [
            JointRow(
                t=int(row["t"]),
                regret_gap=float(row["regret_gap"]),
                nfcce_gap=float(row["nfcce_gap"]),
                value_0=float(row["value_0"]),
                value_1=float(row["value_1"]) if row["value_1"] else None,
            )
            for row in csv.DictReader(handle)
        ]


def emit_config(config: RunConfig, path: PathLike, **extra: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"config": config.model_dump(mode="json"), **extra}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    return path


def emit_trajectories(history: RunHistory, path: PathLike) -> Path:
    """One row per step: episode, step, infoset id, action index, reward."""

    rows: List[Dict[str, Any]] = []
    tree = history.tree
    for episode, trajectory in enumerate(history.trajectories):
        for step, (x, a, r) in enumerate(trajectory.steps):
            rows.append(
                {"episode": episode, "step": step, "infoset": tree.infoset_ids[x], "action": a, "reward": r}
            )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = ["episode", "step", "infoset", "action", "reward"]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
    return path


def emit_snapshot(snapshot: LearnerSnapshot, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(snapshot.model_dump_json(), encoding="utf-8")
    return path


def load_snapshot(path: PathLike) -> LearnerSnapshot:
    return LearnerSnapshot.model_validate_json(Path(path).read_text(encoding="utf-8"))


def write_outcome(
    outcome: RunOutcome,
    directory: PathLike,
    *,
    recorder: Optional[StructuredTelemetrySink] = None,
) -> Dict[str, Any]:
    """Write every artifact of a finished run into ``directory`` and return a short summary.

    Single-learner runs produce ``metrics.csv``, ``snapshot.json`` and, with
    ``trajectory_log``, ``trajectories.csv``; self-play runs produce the
    joint and per-player CSVs. Both get ``config.json`` and, when a recorder
    is given, ``events.json``.
    """

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    summary: Dict[str, Any] = {"game": outcome.game, "seed": outcome.config.seed, "out_dir": str(directory)}
    hyper = outcome.hyper.model_dump() if outcome.hyper is not None else None
    emit_config(outcome.config, directory / "config.json", game=outcome.game, hyper=hyper)
    if outcome.history is not None:
        emit_metrics(outcome.history, directory / "metrics.csv")
        if outcome.history.trajectories:
            emit_trajectories(outcome.history, directory / "trajectories.csv")
        if outcome.history.rows:
            summary.update(outcome.history.rows[-1].as_dict())
    if outcome.joint is not None:
        emit_joint_metrics(outcome.joint, directory)
        summary.update({"efce_gap": outcome.joint.efce_gap, "nash_gap": outcome.joint.nash_gap})
        if outcome.joint.rows:
            summary.update(outcome.joint.rows[-1].as_dict())
    for i, snapshot in enumerate(outcome.snapshots):
        name = "snapshot.json" if len(outcome.snapshots) == 1 else f"snapshot{i}.json"
        emit_snapshot(snapshot, directory / name)
    if recorder is not None:
        bundle = recorder.build_bundle(
            config=outcome.config.model_dump(mode="json"),
            game={"name": outcome.game},
            metadata={"hyper": hyper},
        )
        (directory / "events.json").write_text(json.dumps(bundle, ensure_ascii=False), encoding="utf-8")
    return summary


__all__ = [
    "METRIC_COLUMNS",
    "JOINT_COLUMNS",
    "emit_metrics",
    "emit_joint_metrics",
    "read_metrics",
    "read_joint_metrics",
    "emit_config",
    "emit_trajectories",
    "emit_snapshot",
    "load_snapshot",
    "write_outcome",
]
