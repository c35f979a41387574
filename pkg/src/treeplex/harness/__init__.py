from .config import Opponent, RunConfig, cadence_points
from .history import JointHistory, JointRow, MetricRow, RunHistory
from .runner import RunOutcome, execute, run_adversarial, run_self_play
from .verify import VerifyReport, run_verify

__all__ = [
    "Opponent",
    "RunConfig",
    "cadence_points",
    "JointHistory",
    "JointRow",
    "MetricRow",
    "RunHistory",
    "RunOutcome",
    "execute",
    "run_adversarial",
    "run_self_play",
    "VerifyReport",
    "run_verify",
]
