from treeplex.telemetry.base import Events, NullTelemetrySink, resolve_sink
from treeplex.telemetry.recorder import StructuredTelemetrySink


def make_recorder(**kwargs):
    recorder = StructuredTelemetrySink(**kwargs)
    recorder.emit(Events.RUN_STARTED, {"algorithm": "efce-omd", "T": 4})
    for t in range(1, 5):
        recorder.emit(Events.EPISODE_COMPLETED, {"t": t, "loss": 0.5})
    recorder.emit(Events.METRICS_ROW, {"t": 4, "trigger_regret": 0.25})
    recorder.emit(Events.RUN_COMPLETED, {"t": 4})
    return recorder


def test_recorder_skips_episodes_unless_asked():
    assert [e.event for e in make_recorder().events] == [
        Events.RUN_STARTED,
        Events.METRICS_ROW,
        Events.RUN_COMPLETED,
    ]
    assert len(list(make_recorder(keep_episodes=True).events)) == 7


def test_recorder_numbers_events_and_collects_metrics():
    recorder = make_recorder()
    assert [e.seq for e in recorder.events] == [0, 1, 2]
    assert recorder.metrics == [{"t": 4, "trigger_regret": 0.25}]


def test_bundle_digest_depends_only_on_config():
    first = make_recorder().build_bundle(config={"T": 4, "seed": 0}, game={"name": "kuhn"})
    second = make_recorder().build_bundle(config={"seed": 0, "T": 4}, game={"name": "other"})
    third = make_recorder().build_bundle(config={"T": 8, "seed": 0}, game={"name": "kuhn"})
    assert first["config_sha256"] == second["config_sha256"]
    assert first["config_sha256"] != third["config_sha256"]
    assert first["schema_version"] == StructuredTelemetrySink.SCHEMA_VERSION
    assert first["events"][0]["payload"] == {"algorithm": "efce-omd", "T": 4}


def test_resolve_sink_defaults_to_null():
    assert isinstance(resolve_sink(None), NullTelemetrySink)
    recorder = StructuredTelemetrySink()
    assert resolve_sink(recorder) is recorder
