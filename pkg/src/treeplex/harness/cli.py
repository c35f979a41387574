"""``treeplex`` command line: run, verify, experiment, sweep."""

from __future__ import annotations

import argparse
import json
import os
from datetime import datetime
from functools import partial
from typing import Any, Dict, List, Optional, Sequence

import anyio
from pydantic import ValidationError

from ..errors import EnumerationCapExceeded, EpisodeError, GameSpecError
from ..learners.base import Algorithm, Feedback
from ..telemetry.console import ConsoleTelemetrySink, MultiTelemetrySink
from ..telemetry.recorder import StructuredTelemetrySink
from .config import Opponent, RunConfig
from .emit import write_outcome
from .runner import execute
from .sweep import run_sweep
from .verify import run_verify


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--game", help="'kuhn', a gen:random:<seed>:<layers>:<branching>:<A> string or a JSON game file")
    parser.add_argument("--algo", dest="algorithm", choices=[a.value for a in Algorithm])
    parser.add_argument("--feedback", choices=[f.value for f in Feedback])
    parser.add_argument("--T", dest="T", type=int)
    parser.add_argument("--eta", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--delta", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--players", type=int)
    parser.add_argument("--player", type=int)
    parser.add_argument("--out", dest="out_dir")
    parser.add_argument("--cadence", help="'pow2' or a step that divides T")
    parser.add_argument("--opponent", choices=[o.value for o in Opponent])
    parser.add_argument("--resync-every", dest="resync_every", type=int)
    parser.add_argument("--trajectory-log", dest="trajectory_log", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treeplex", description="No-regret learning in tree-form games.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one learner (or self-play) and write metrics")
    _add_run_flags(run)

    verify = sub.add_parser("verify", help="check every recursion against enumeration oracles")
    verify.add_argument("--quick", action="store_true", help="smaller random-input budget")

    experiment = sub.add_parser("experiment", help="run a registered experiment")
    experiment.add_argument("slug", nargs="?", help="experiment slug; omit to list them")
    experiment.add_argument("--set", dest="values", action="append", default=[], metavar="KEY=VALUE")
    experiment.add_argument("--out", dest="out_path")

    sweep = sub.add_parser("sweep", help="run one config per seed in worker processes")
    _add_run_flags(sweep)
    sweep.add_argument("--seeds", type=int, nargs="+", required=True)
    sweep.add_argument("--workers", type=int)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    names = set(RunConfig.model_fields)
    return {k: v for k, v in vars(args).items() if k in names}


def _load_config(args: argparse.Namespace) -> RunConfig:
    try:
        return RunConfig.from_env(_overrides(args))
    except ValidationError as exc:
        raise SystemExit(f"invalid configuration:\n{exc}") from exc


def _parse_values(pairs: Sequence[str]) -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep:
            raise SystemExit(f"--set expects KEY=VALUE, got '{pair}'")
        try:
            values[key.strip()] = json.loads(raw)
        except json.JSONDecodeError:
            values[key.strip()] = raw
    return values


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args)
    recorder = StructuredTelemetrySink()
    sink = MultiTelemetrySink([ConsoleTelemetrySink(), recorder])
    try:
        outcome = execute(config, telemetry=sink)
    except (GameSpecError, EnumerationCapExceeded, EpisodeError) as exc:
        raise SystemExit(str(exc)) from exc
    directory = config.out_dir or f"runs/{datetime.now().strftime('%Y%m%d-%H%M%S')}"
    summary = write_outcome(outcome, directory, recorder=recorder)
    print(f"wrote {summary['out_dir']}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    report = run_verify(quick=args.quick, telemetry=ConsoleTelemetrySink())
    return 0 if report.passed else 1


def _cmd_experiment(args: argparse.Namespace) -> int:
    from ..experiments import ExperimentRegistry

    registry = ExperimentRegistry()
    if not args.slug:
        for slug in registry.list():
            print(f"{slug}: {registry.get(slug).description}")
        return 0
    try:
        experiment = registry.get(args.slug)
        config = experiment.parse_config(**_parse_values(args.values))
    except KeyError as exc:
        raise SystemExit(str(exc)) from exc
    except ValidationError as exc:
        raise SystemExit(f"invalid experiment configuration:\n{exc}") from exc
    result = anyio.run(experiment.run, config, ConsoleTelemetrySink())
    out = args.out_path or f"runs/{args.slug}-{datetime.now().strftime('%Y%m%d-%H%M%S')}.json"
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        json.dump({"slug": args.slug, "config": config.model_dump(mode="json"), **result.model_dump()}, f, indent=2)
    verdict = "passed" if result.passed else "failed"
    print(f"[{verdict}] wrote {out}")
    return 0 if result.passed else 1


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_config(args)
    try:
        summaries: List[Dict[str, Any]] = anyio.run(
            partial(run_sweep, config, args.seeds, workers=args.workers, telemetry=ConsoleTelemetrySink())
        )
    except ValueError as exc:
        raise SystemExit(str(exc)) from exc
    for summary in summaries:
        print(f"seed {summary['seed']}: {summary['out_dir']}")
    return 0


COMMANDS = {"run": _cmd_run, "verify": _cmd_verify, "experiment": _cmd_experiment, "sweep": _cmd_sweep}


def main(argv: Optional[Sequence[str]] = None) -> None:
    args = build_parser().parse_args(argv)
    try:
        code = COMMANDS[args.command](args)
    except KeyboardInterrupt:
        raise SystemExit(130)
    raise SystemExit(code)


if __name__ == "__main__":  # pragma: no cover
    main()
