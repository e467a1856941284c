"""Store tests: ordering rules, window queries against linear-scan oracles,
feature alignment, persistence round-trips."""

import io
import math

import pytest

from millassist.errors import ConflictError, NotFoundError, RangeError, ValidationError
from millassist.records import (
    AlarmEvent,
    LabMeasurement,
    ReelRecord,
    SensorReading,
    SortingBatch,
    record_timestamp,
    to_line,
)
from millassist.sim import build_scenario, default_config, write_plan_log
from millassist.store import EventStore, FeatureField, MISSING, StoreConfig


def reading(tag="probe", ts=0, value=1.0):
    return SensorReading(tag=tag, timestamp=ts, value=value, unit="u",
                         quality_flag="good")


@pytest.fixture(scope="module")
def scenario_plan():
    return build_scenario(default_config(seed=17, duration_s=7200.0,
                                         reel_duration_s=300.0))


@pytest.fixture()
def loaded_store(scenario_plan):
    store = EventStore()
    for record in scenario_plan.records:
        store.append(record)
    return store


def test_sequence_numbers_increase():
    store = EventStore()
    assert store.append(reading(ts=0)) == 1
    assert store.append(reading(ts=10)) == 2


def test_out_of_order_same_tag_rejected():
    store = EventStore()
    store.append(reading(ts=100))
    with pytest.raises(ValidationError):
        store.append(reading(ts=100))
    with pytest.raises(ValidationError):
        store.append(reading(ts=50))
    store.append(reading(tag="other", ts=50))  # other tags are independent


def test_cleared_alarm_requires_prior_raise():
    store = EventStore()
    cleared = AlarmEvent(alarm_id="alm-000001", tag="t", error_code="E1",
                         severity="warning", state="cleared", timestamp=5)
    with pytest.raises(ValidationError):
        store.append(cleared)
    raised = AlarmEvent(alarm_id="alm-000001", tag="t", error_code="E1",
                        severity="warning", state="raised", timestamp=1)
    store.append(raised)
    store.append(cleared)


def test_replay_acknowledges_every_record(scenario_plan, tmp_path):
    path = tmp_path / "scenario.log"
    write_plan_log(scenario_plan, path)
    store = EventStore()
    with open(path) as fp:
        n = store.replay(fp)
    assert n == len(scenario_plan.records)
    assert len(store) == n


def test_empty_store_empty_window():
    assert EventStore().query_window("sensor", 0, 10_000) == []


def test_degenerate_window_is_empty(loaded_store):
    assert loaded_store.query_window("sensor", 1000, 1000) == []


def test_window_start_after_end_rejected(loaded_store):
    with pytest.raises(RangeError):
        loaded_store.query_window("sensor", 10, 5)


def test_query_window_matches_linear_scan(scenario_plan, loaded_store):
    t0, t1 = 1_000_000, 3_600_000
    for key in ("sensor", "alarm", "lab", "stock_ash", "sheet_moisture"):
        got = loaded_store.query_window(key, t0, t1)
        expected = [r for r in scenario_plan.records
                    if t0 <= record_timestamp(r) < t1
                    and (getattr(r, "tag", None) == key
                         if key not in ("sensor", "alarm", "lab")
                         else type(r).__name__.lower().startswith(key))]
        assert [to_line(r) for r in got] == [to_line(r) for r in expected], key


def test_append_then_query_round_trips_bit_exact():
    store = EventStore()
    r = reading(ts=123, value=math.pi)
    store.append(r)
    [back] = store.query_window("probe", 0, 1000)
    assert back == r
    assert to_line(back) == to_line(r)


def test_align_mean_matches_brute_force(scenario_plan, loaded_store):
    spec = [FeatureField(tag="stock_ash", agg="mean")]
    for reel_id in loaded_store.reel_ids[:10]:
        reel = loaded_store.reel(reel_id)
        vec = loaded_store.align_features(reel_id, spec)
        raw = [r.value for r in scenario_plan.records
               if isinstance(r, SensorReading) and r.tag == "stock_ash"
               and reel.start <= r.timestamp < reel.end]
        assert raw, reel_id
        expected = sum(raw) / len(raw)
        assert vec.values[0] == pytest.approx(expected, rel=1e-9)


def test_align_constant_value_mean_is_that_value():
    store = EventStore()
    for i in range(10):
        store.append(reading(ts=i * 1000, value=7.25))
    store.append(ReelRecord(reel_id="reel-000001", start=0, end=10_000))
    vec = store.align_features("reel-000001", [FeatureField("probe", "mean")])
    assert vec.values[0] == 7.25


def test_align_all_aggregations():
    store = EventStore()
    values = [1.0, 5.0, 3.0]
    for i, v in enumerate(values):
        store.append(reading(ts=i * 1000, value=v))
    store.append(ReelRecord(reel_id="reel-000001", start=0, end=3000))
    spec = [FeatureField("probe", agg) for agg in ("mean", "min", "max", "last", "stddev")]
    vec = store.align_features("reel-000001", spec)
    got = vec.as_dict()
    assert got["probe:mean"] == pytest.approx(3.0)
    assert got["probe:min"] == 1.0
    assert got["probe:max"] == 5.0
    assert got["probe:last"] == 3.0
    assert got["probe:stddev"] == pytest.approx(math.sqrt(8 / 3))


def test_align_empty_window_yields_missing_not_zero():
    store = EventStore()
    store.append(reading(ts=50_000))  # exists, but after the reel
    store.append(ReelRecord(reel_id="reel-000001", start=0, end=10_000))
    vec = store.align_features("reel-000001", [FeatureField("probe", "mean")])
    assert vec.values[0] is MISSING
    assert vec.values[0] != 0


def test_align_last_looks_back_past_window_start():
    store = EventStore()
    store.append(reading(ts=1000, value=42.0))
    store.append(ReelRecord(reel_id="reel-000002", start=60_000, end=70_000))
    vec = store.align_features("reel-000002", [FeatureField("probe", "last")])
    assert vec.values[0] == 42.0


def test_align_unknown_tag_names_the_tag():
    store = EventStore()
    store.append(ReelRecord(reel_id="reel-000001", start=0, end=1000))
    with pytest.raises(ValidationError, match="nope"):
        store.align_features("reel-000001", [FeatureField("nope", "mean")])


def test_align_unknown_reel():
    with pytest.raises(NotFoundError):
        EventStore().align_features("reel-404", [])


def test_align_trailing_window():
    store = EventStore()
    for i in range(10):
        store.append(reading(ts=i * 1000, value=float(i)))
    store.append(ReelRecord(reel_id="reel-000001", start=0, end=10_000))
    vec = store.align_features("reel-000001",
                               [FeatureField("probe", "mean", window=3.0)])
    # window [7000, 10000): samples 7, 8, 9
    assert vec.values[0] == pytest.approx(8.0)


def test_align_is_pure(loaded_store):
    spec = [FeatureField("stock_ash", "mean"), FeatureField("fiber_length", "stddev")]
    a = loaded_store.align_features("reel-000003", spec)
    b = loaded_store.align_features("reel-000003", spec)
    assert a.values == b.values and a.names == b.names


def test_sorting_batch_ratio_sum_enforced():
    bad = SortingBatch(delivery_id="d1", en643_grade="1.02",
                       composition={"a": 0.5, "b": 0.4}, sorted_at=10, delivered_at=0)
    with pytest.raises(ValidationError):
        EventStore().attach_sorting_batch(bad)


def test_duplicate_delivery_conflict():
    batch = SortingBatch(delivery_id="d1", en643_grade="1.02",
                         composition={"a": 1.0}, sorted_at=10, delivered_at=0)
    store = EventStore()
    store.attach_sorting_batch(batch)
    with pytest.raises(ConflictError):
        store.attach_sorting_batch(batch)


def test_sorting_features_through_consumption_window():
    config = StoreConfig(consumption_delay_s=(10.0, 100.0))
    store = EventStore(config)
    batch = SortingBatch(delivery_id="d1", en643_grade="1.02",
                         composition={"deinking": 0.7, "mixed": 0.3},
                         sorted_at=0, delivered_at=0)
    assoc = store.attach_sorting_batch(batch)
    assert assoc.flag == "estimated"
    assert assoc.window == (10_000, 100_000)
    store.append(ReelRecord(reel_id="reel-000001", start=20_000, end=40_000))
    store.append(ReelRecord(reel_id="reel-000002", start=500_000, end=520_000))
    spec = [FeatureField("sorting.deinking", "mean")]
    assert store.align_features("reel-000001", spec).values[0] == 0.7
    assert store.align_features("reel-000002", spec).values[0] is MISSING


def test_lab_before_reel_end_rejected():
    store = EventStore()
    store.append(ReelRecord(reel_id="reel-000001", start=0, end=10_000))
    bad = LabMeasurement(reel_id="reel-000001", parameter="tensile_strength",
                         value=40.0, spec_low=36.0, spec_high=44.0, measured_at=9_000)
    with pytest.raises(ValidationError):
        store.append(bad)


def test_export_window_matches_source_slice(scenario_plan, loaded_store, tmp_path):
    t0, t1 = 0, 2_000_000
    buf = io.StringIO()
    n = loaded_store.export_window(t0, t1, buf)
    expected = [to_line(r) for r in scenario_plan.records
                if t0 <= record_timestamp(r) < t1]
    got = buf.getvalue().splitlines()
    assert n == len(expected)
    assert sorted(got) == sorted(expected)


def test_persistence_rebuilds_identical_state(scenario_plan, tmp_path):
    data_dir = tmp_path / "store"
    store = EventStore(StoreConfig(data_dir=data_dir, segment_records=500))
    for record in scenario_plan.records:
        store.append(record)
    spec = [FeatureField("stock_ash", "mean"), FeatureField("sheet_moisture", "max")]
    before = store.align_features("reel-000005", spec)
    count = len(store)
    store.close()

    assert len(list(data_dir.glob("segment-*.jsonl"))) > 1
    reopened = EventStore(StoreConfig(data_dir=data_dir))
    assert len(reopened) == count
    after = reopened.align_features("reel-000005", spec)
    assert after.values == before.values
    reopened.close()


def test_partial_trailing_line_dropped_on_reopen(tmp_path):
    data_dir = tmp_path / "store"
    store = EventStore(StoreConfig(data_dir=data_dir))
    store.append(reading(ts=0))
    store.append(reading(ts=10))
    store.close()
    [segment] = list(data_dir.glob("segment-*.jsonl"))
    with open(segment, "a") as fp:
        fp.write('{"kind": "sensor", "tag": "probe", "timest')
    reopened = EventStore(StoreConfig(data_dir=data_dir))
    assert len(reopened) == 2
    reopened.close()
