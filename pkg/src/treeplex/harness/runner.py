"""Online interaction loops: one learner against a schedule, or all players in self-play."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from ..errors import EpisodeError, GameSpecError
from ..feedback.losses import expected_loss
from ..feedback.sampling import episode_rng, sample_trajectory
from ..games.efg import ExtensiveGame, PlayerView, expected_utilities, player_views, reduce_efg, simulate_episode
from ..games.environment import EpisodeEnvironment, Trajectory, random_environment
from ..games.loader import LoadedGame, load_game
from ..games.policy import seq_to_behavioral
from ..games.tree import GameTree
from ..learners.base import BaseLearner, Feedback, LearnerSnapshot
from ..learners.hyperparams import HyperParameters
from ..learners.registry import build_learner
from ..telemetry.base import Events, TelemetrySink, resolve_sink
from ..triggers.best_response import best_vertex_response
from .config import Opponent, RunConfig
from .history import JointHistory, JointRow, RunHistory
from .metrics import efce_gap, metric_row, nash_gap, nfcce_gap, reduced_loss, regret_gap

SAMPLE_STREAM = 0
ENV_STREAM = 1
SELF_PLAY_STREAM = 2

LossSource = Union[EpisodeEnvironment, np.ndarray]
Schedule = Callable[[int, RunHistory], LossSource]


# schedules -----------------------------------------------------------------------


def constant_schedule(source: LossSource) -> Schedule:
    return lambda t, history: source


def cyclic_schedule(sources: Sequence[LossSource]) -> Schedule:
    if not sources:
        raise ValueError("cyclic schedule needs at least one episode")
    items = tuple(sources)
    return lambda t, history: items[t % len(items)]


def random_schedule(tree: GameTree, seed: int, *, deterministic: bool = False) -> Schedule:
    """A fresh random environment per episode, keyed by (seed, episode)."""

    return lambda t, history: random_environment(
        tree, episode_rng(seed, t, ENV_STREAM), deterministic=deterministic
    )


def efg_schedule(
    game: ExtensiveGame,
    player: int,
    opponent: Opponent = Opponent.UNIFORM,
    views: Optional[Sequence[PlayerView]] = None,
) -> Schedule:
    """Environments of ``player`` in ``game`` against a uniform or adaptive opponent.

    The adaptive opponent plays a deterministic best response to the
    learner's average policy over the episodes so far (uniform at t = 0).
    """

    views = tuple(views or player_views(game))
    view = views[player]
    uniform = reduce_efg(game, player, None, view=view)
    if opponent is Opponent.UNIFORM or game.num_players == 1:
        return constant_schedule(uniform)
    rival = views[1 - player]

    def schedule(t: int, history: RunHistory) -> LossSource:
        if history.t == 0:
            return uniform
        average = history.average_policy()
        rival_loss = expected_loss(reduce_efg(game, rival.player, view.behavioral_map(average), view=rival))
        response, _ = best_vertex_response(rival.tree, rival_loss)
        return reduce_efg(game, player, rival.behavioral_map(response), view=view)

    return schedule


# adversarial runs ----------------------------------------------------------------


def prepare_learner(
    config: RunConfig,
    tree: GameTree,
    *,
    telemetry: Optional[TelemetrySink] = None,
    hyper: Optional[HyperParameters] = None,
) -> BaseLearner:
    hyper = hyper or HyperParameters.resolve(tree, config)
    return build_learner(
        config.algorithm,
        tree,
        hyper,
        telemetry=telemetry,
        resync_every=config.resync_every,
        enumeration_cap=config.enumeration_cap,
    )


def _observe(
    learner: BaseLearner,
    feedback: Feedback,
    source: LossSource,
    policy: np.ndarray,
    rng_seed: int,
    t: int,
) -> tuple[np.ndarray, Optional[Trajectory]]:
    if isinstance(source, EpisodeEnvironment):
        loss = expected_loss(source)
    else:
        loss = np.asarray(source, dtype=float)
    trajectory = None
    if feedback is Feedback.BANDIT:
        if not isinstance(source, EpisodeEnvironment):
            raise ValueError("bandit feedback needs an environment schedule, got a raw loss vector")
        trajectory = sample_trajectory(source, policy, episode_rng(rng_seed, t, SAMPLE_STREAM))
        learner.update_bandit(trajectory)
    else:
        learner.update(loss)
    return loss, trajectory


def run_adversarial(
    config: RunConfig,
    tree: GameTree,
    schedule: Schedule,
    *,
    learner: Optional[BaseLearner] = None,
    history: Optional[RunHistory] = None,
    telemetry: Optional[TelemetrySink] = None,
) -> RunHistory:
    """Play ``config.T`` episodes of one learner against ``schedule``.

    Passing a restored ``learner`` together with the ``history`` it was
    snapshotted at resumes the run; the remaining episodes and metric rows
    are identical to an uninterrupted run.
    """

    sink = resolve_sink(telemetry)
    learner = learner or prepare_learner(config, tree, telemetry=sink)
    if history is None:
        history = RunHistory(tree, config.T, label=config.algorithm.value)
    else:
        history = history.truncated(history.t, config.T)
    if learner.t != history.t:
        raise ValueError(f"learner is at episode {learner.t} but the history holds {history.t}")
    points = set(config.cadence_points())

    sink.emit(
        Events.RUN_STARTED,
        {
            "algorithm": config.algorithm.value,
            "feedback": config.feedback.value,
            "T": config.T,
            "start": history.t,
            "eta": learner.eta,
            "gamma": learner.gamma,
            "infosets": tree.num_infosets,
            "actions": tree.num_actions,
        },
    )
    for t in range(history.t, config.T):
        policy = learner.policy.copy()
        try:
            residual = learner.residual()
            source = schedule(t, history)
            loss, trajectory = _observe(learner, config.feedback, source, policy, config.seed, t)
        except Exception as exc:
            sink.emit(Events.RUN_FAILED, {"episode": t, "error": str(exc)})
            raise EpisodeError(t, str(exc)) from exc
        history.record(
            policy,
            loss,
            residual=residual,
            trajectory=trajectory if config.trajectory_log else None,
        )
        sink.emit(Events.EPISODE_COMPLETED, {"t": t + 1, "loss": float(policy @ loss)})
        if t + 1 in points:
            row = metric_row(history, t + 1)
            history.rows.append(row)
            sink.emit(Events.METRICS_ROW, row.as_dict())

    final = history.rows[-1].as_dict() if history.rows else {}
    sink.emit(Events.RUN_COMPLETED, {"algorithm": config.algorithm.value, **final})
    return history


# self-play -----------------------------------------------------------------------


def run_self_play(
    configs: Sequence[RunConfig],
    game: ExtensiveGame,
    *,
    telemetry: Optional[TelemetrySink] = None,
    with_efce_gap: bool = True,
) -> JointHistory:
    """Uncoupled self-play: each player's learner only sees its own feedback.

    Every episode each player's environment is the reduction of ``game``
    against the co-players' current policies. Cadence and sampling seed
    come from the first config.
    """

    sink = resolve_sink(telemetry)
    views = player_views(game)
    n = game.num_players
    if len(configs) == 1:
        configs = list(configs) * n
    if len(configs) != n:
        raise ValueError(f"{game.name} has {n} players, got {len(configs)} configs")
    T = configs[0].T
    if any(c.T != T for c in configs):
        raise ValueError("all players must run for the same T")
    lead = configs[0]
    learners = [prepare_learner(c, view.tree, telemetry=sink) for c, view in zip(configs, views)]
    histories = tuple(RunHistory(view.tree, T, label=f"player{i}") for i, view in enumerate(views))
    joint = JointHistory(players=histories, utilities=np.zeros((T, n)))
    points = set(lead.cadence_points())
    bandit = any(c.feedback is Feedback.BANDIT for c in configs)

    sink.emit(
        Events.RUN_STARTED,
        {
            "mode": "self-play",
            "game": game.name,
            "algorithms": [c.algorithm.value for c in configs],
            "feedback": [c.feedback.value for c in configs],
            "T": T,
        },
    )
    for t in range(T):
        policies = [learner.policy.copy() for learner in learners]
        try:
            residuals = [learner.residual() for learner in learners]
            losses = [reduced_loss(game, views, i, policies) for i in range(n)]
            behaviors = [view.behavioral_map(p) for view, p in zip(views, policies)]
            joint.utilities[t] = expected_utilities(game, behaviors)
            trajectories: List[Optional[Trajectory]] = [None] * n
            if bandit:
                full = [seq_to_behavioral(view.tree, p) for view, p in zip(views, policies)]
                trajectories = simulate_episode(game, views, full, episode_rng(lead.seed, t, SELF_PLAY_STREAM))
            for i, (learner, config) in enumerate(zip(learners, configs)):
                if config.feedback is Feedback.BANDIT:
                    learner.update_bandit(trajectories[i])
                else:
                    learner.update(losses[i])
        except Exception as exc:
            sink.emit(Events.RUN_FAILED, {"episode": t, "error": str(exc)})
            raise EpisodeError(t, str(exc)) from exc
        for i, history in enumerate(histories):
            keep = trajectories[i] if configs[i].trajectory_log else None
            history.record(policies[i], losses[i], residual=residuals[i], trajectory=keep)
        sink.emit(Events.EPISODE_COMPLETED, {"t": t + 1, "values": joint.utilities[t].tolist()})
        if t + 1 in points:
            for history in histories:
                history.rows.append(metric_row(history, t + 1))
            means = joint.utilities[: t + 1].mean(axis=0)
            row = JointRow(
                t=t + 1,
                regret_gap=regret_gap(joint, t + 1),
                nfcce_gap=nfcce_gap(joint, t + 1),
                value_0=float(means[0]),
                value_1=float(means[1]) if n > 1 else None,
            )
            joint.rows.append(row)
            sink.emit(Events.METRICS_ROW, row.as_dict())

    if with_efce_gap:
        joint.efce_gap = efce_gap(game, views, joint.product_policies())
    if n == 2:
        joint.nash_gap = nash_gap(game, views, [h.average_policy() for h in histories])
    sink.emit(
        Events.RUN_COMPLETED,
        {"mode": "self-play", "efce_gap": joint.efce_gap, "nash_gap": joint.nash_gap, **joint.rows[-1].as_dict()},
    )
    return joint


# one-call entry ------------------------------------------------------------------


@dataclass
class RunOutcome:
    config: RunConfig
    game: str
    hyper: Optional[HyperParameters] = None
    history: Optional[RunHistory] = None
    joint: Optional[JointHistory] = None
    snapshots: List[LearnerSnapshot] = field(default_factory=list)


def adversarial_setup(config: RunConfig, loaded: LoadedGame) -> tuple[GameTree, Schedule]:
    """The learner's tree and the schedule it faces for a single-learner run."""

    if loaded.is_efg:
        assert loaded.efg is not None
        views = player_views(loaded.efg)
        if config.player >= len(views):
            raise GameSpecError(f"{loaded.name} has no player {config.player}")
        return views[config.player].tree, efg_schedule(loaded.efg, config.player, config.opponent, views)
    assert loaded.tree is not None
    if loaded.schedule:
        return loaded.tree, cyclic_schedule(loaded.schedule)
    return loaded.tree, random_schedule(loaded.tree, config.seed)


def execute(config: RunConfig, *, telemetry: Optional[TelemetrySink] = None) -> RunOutcome:
    loaded = load_game(config.game)
    if config.players > 1:
        if not loaded.is_efg:
            raise GameSpecError(f"self-play needs an extensive-form game, '{loaded.name}' is a single tree")
        assert loaded.efg is not None
        joint = run_self_play([config], loaded.efg, telemetry=telemetry)
        return RunOutcome(config=config, game=loaded.name, joint=joint)
    tree, schedule = adversarial_setup(config, loaded)
    hyper = HyperParameters.resolve(tree, config)
    learner = prepare_learner(config, tree, telemetry=telemetry, hyper=hyper)
    history = run_adversarial(config, tree, schedule, learner=learner, telemetry=telemetry)
    return RunOutcome(config=config, game=loaded.name, hyper=hyper, history=history, snapshots=[learner.snapshot()])


__all__ = [
    "Schedule",
    "LossSource",
    "constant_schedule",
    "cyclic_schedule",
    "random_schedule",
    "efg_schedule",
    "prepare_learner",
    "run_adversarial",
    "run_self_play",
    "RunOutcome",
    "adversarial_setup",
    "execute",
]
