import copy
import json

import pytest

from grtc import (
    CorruptRecord,
    OperatorPolicy,
    StrategySet,
    TaskSchedule,
    TraceConfig,
    dump_record,
    generate_trace,
    load_record,
    build_initial_state,
    record_to_dict,
    run_rotation,
    validate_record,
)
from grtc.recordcheck import ReplayFailure, replay_entries


@pytest.fixture(scope="module")
def record_doc():
    policy = OperatorPolicy(d=2)
    strategies = StrategySet.seeded("balanced", "pred-first", 17)
    config = TraceConfig(seed=17, duration=40, arrival_rate=0.8,
                         departure_rate=0.08, initial_workers=8)
    roster, events = generate_trace(config)
    initial = build_initial_state(roster, policy)
    record = run_rotation(initial, policy, strategies,
                          TaskSchedule.periodic(1.0, 40), events,
                          config={"d": 2, "seed": 17})
    doc = record_to_dict(record)
    # make sure the fixture actually exercises restructuring
    ops = {e["op"] for log in doc["change_logs"] for e in log}
    assert {"inserted", "removed"} <= ops
    return doc


class TestValidateRecord:
    def test_fresh_record_is_clean(self, record_doc):
        result = validate_record(record_doc)
        assert result.ok, result.violations

    def test_corrupted_ring_order(self, record_doc):
        doc = copy.deepcopy(record_doc)
        snap = doc["states"][3]
        snap["ring"] = snap["ring"][::-1]
        result = validate_record(doc)
        codes = {f.code for f in result.violations}
        assert "FollowsWrongSuccessor" in codes or "ReplayMismatch" in codes

    def test_duplicated_worker(self, record_doc):
        doc = copy.deepcopy(record_doc)
        snap = doc["states"][2]
        g1, g2 = snap["ring"][0], snap["ring"][1]
        snap["members"][g2] = snap["members"][g2] + [snap["members"][g1][0]]
        result = validate_record(doc)
        assert any(f.code == "NotPartition" for f in result.violations)
        assert any(f.step == 2 for f in result.violations)

    def test_overlap_injected(self, record_doc):
        doc = copy.deepcopy(record_doc)
        prev, nxt = doc["states"][0], doc["states"][1]
        moved = prev["members"][prev["current"]][0]
        target = nxt["current"]
        for g in nxt["ring"]:
            if moved in nxt["members"][g]:
                nxt["members"][g] = [t for t in nxt["members"][g] if t != moved]
        nxt["members"][target] = nxt["members"][target] + [moved]
        result = validate_record(doc)
        assert any(f.code == "FollowsOverlap" for f in result.violations)

    def test_tampered_membership_fails_replay(self, record_doc):
        doc = copy.deepcopy(record_doc)
        snap = doc["states"][5]
        g = snap["ring"][0]
        snap["members"][g] = list(reversed(snap["members"][g]))
        result = validate_record(doc)
        assert not result.ok

    def test_replay_rejects_bogus_entry(self, record_doc):
        snap = record_doc["states"][0]
        with pytest.raises(ReplayFailure):
            replay_entries(snap, [{"op": "removed", "worker": "nope",
                                   "group": snap["ring"][0]}])


class TestRecordIO:
    def test_dump_and_load_roundtrip(self, record_doc, tmp_path):
        path = tmp_path / "record.json"
        dump_record(record_doc, path)
        assert load_record(path) == record_doc

    def test_load_rejects_missing_keys(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"v": 1, "config": {}, "states": []}))
        with pytest.raises(CorruptRecord):
            load_record(path)

    def test_load_rejects_wrong_version(self, tmp_path):
        path = tmp_path / "v2.json"
        path.write_text(json.dumps({"v": 2}))
        with pytest.raises(CorruptRecord):
            load_record(path)

    def test_snapshot_schema(self, record_doc):
        snap = record_doc["states"][0]
        assert set(snap) == {"step", "current", "ring", "members"}
        assert list(snap["members"]) == snap["ring"]  # members in ring order
