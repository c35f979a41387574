import anyio
import pytest
from pydantic import ValidationError

from treeplex.experiments.bandit_random_tree import BanditRandomTreeConfig, BanditRandomTreeExperiment
from treeplex.experiments.base import ExperimentResult
from treeplex.experiments.full_feedback_kuhn import FullFeedbackKuhnConfig
from treeplex.experiments.registry import ExperimentRegistry
from treeplex.experiments.self_play_kuhn import SelfPlayKuhnConfig
from treeplex.telemetry.recorder import StructuredTelemetrySink


def test_registry_lists_every_experiment():
    registry = ExperimentRegistry()
    assert list(registry.list()) == ["bandit-random-tree", "full-feedback-kuhn", "self-play-kuhn"]
    assert registry.get("self-play-kuhn").config_cls is SelfPlayKuhnConfig


def test_registry_rejects_duplicates_and_unknown_slugs():
    registry = ExperimentRegistry()
    with pytest.raises(ValueError, match="already registered"):
        registry.register(BanditRandomTreeExperiment())
    with pytest.raises(KeyError):
        registry.get("nope")


def test_bandit_config_requires_multiple_of_sixteen():
    with pytest.raises(ValidationError):
        BanditRandomTreeConfig(T=100)
    assert BanditRandomTreeConfig(T=160).T == 160


def test_parse_config_uses_experiment_model():
    config = ExperimentRegistry().get("full-feedback-kuhn").parse_config(min_log2_T=3, seed=2)
    assert isinstance(config, FullFeedbackKuhnConfig)
    assert config.seed == 2
    with pytest.raises(ValidationError):
        ExperimentRegistry().get("full-feedback-kuhn").parse_config(growth_limit=0.5)


def test_result_passes_only_when_every_check_holds():
    assert ExperimentResult(metrics={}).passed
    assert ExperimentResult(metrics={}, metadata={"checks": {"a": True, "b": 1}}).passed
    assert not ExperimentResult(metrics={}, metadata={"checks": {"a": True, "b": False}}).passed


def test_self_play_gap_matches_regret_gap():
    experiment = ExperimentRegistry().get("self-play-kuhn")
    result = anyio.run(experiment.run, SelfPlayKuhnConfig(T=64))
    assert result.metadata["checks"]["online_to_batch"]
    assert result.metrics["identity_error"] <= 1e-8
    assert result.metrics["efce_gap"] >= 0.0
    assert len(result.metrics["rows"]) >= 1


def test_full_feedback_collects_one_point_per_doubling():
    experiment = ExperimentRegistry().get("full-feedback-kuhn")
    sink = StructuredTelemetrySink()
    config = FullFeedbackKuhnConfig(min_log2_T=4, max_log2_T=6)
    result = anyio.run(experiment.run, config, sink)
    points = result.metrics["points"]
    assert [p["T"] for p in points] == [16, 32, 64]
    assert len(result.metrics["growth"]) == 2
    assert set(result.metadata["checks"]) == {"average_decreasing", "growth_bounded", "within_bound"}
    assert result.metrics["bound"] > 0
    assert result.metadata["checks"]["within_bound"]
    assert sink.metrics


def test_full_feedback_rejects_inverted_range():
    experiment = ExperimentRegistry().get("full-feedback-kuhn")
    with pytest.raises(ValueError, match="max_log2_T"):
        anyio.run(experiment.run, FullFeedbackKuhnConfig(min_log2_T=5, max_log2_T=4))


def test_bandit_experiment_rejects_large_trees():
    experiment = BanditRandomTreeExperiment()
    config = BanditRandomTreeConfig(T=16, seeds=[0], max_infosets=1)
    with pytest.raises(ValueError, match="at most 1 infosets"):
        anyio.run(experiment.run, config)
