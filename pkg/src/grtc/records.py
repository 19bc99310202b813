"""Run record serialization.

A run record is a JSON document, schema version 1:

    {"v": 1,
     "config": {...},                    # echo of the run configuration
     "states": [{"step": 0, "current": "g1",
                 "ring": ["g1", "g2"],   # order encodes succession
                 "members": {"g1": ["w1"], "g2": ["w2"]}}, ...],
     "change_logs": [[{"op": "inserted", ...}, ...], ...],
     "stalls": [{"time": 3.0, "duration": 2.0}, ...],
     "unconsumed": [{"t": ..., "op": ..., "worker": ...}, ...]}

``change_logs[i]`` explains the transition ``states[i] -> states[i+1]``.
The "members" object lists groups in ring order; each list is the
group's member order.
"""

from __future__ import annotations

import json

from .errors import CorruptRecord
from .generator import RunRecord
from .state import RotationState, WorkerId

SCHEMA_VERSION = 1


def state_snapshot(state: RotationState) -> dict:
    return {
        "step": state.step_index,
        "current": state.current,
        "ring": list(state.ring),
        "members": {g: [w.token for w in ms]
                    for g, ms in zip(state.ring, state.members)},
    }


def snapshot_to_state(snap: dict, seq_of: dict[str, int] | None = None) -> RotationState:
    """Rebuild a state value from its snapshot.

    Sequence numbers are not part of the snapshot; unless a mapping is
    given they are assigned in order of appearance, which is enough for
    validation and metrics but not for resuming a simulation.
    """
    seq_of = dict(seq_of or {})
    members = []
    counter = max(seq_of.values(), default=0)
    for g in snap["ring"]:
        row = []
        for token in snap["members"][g]:
            if token not in seq_of:
                counter += 1
                seq_of[token] = counter
            row.append(WorkerId(token, seq_of[token]))
        members.append(tuple(row))
    return RotationState(
        ring=tuple(snap["ring"]),
        members=tuple(members),
        current=snap["current"],
        step_index=snap["step"],
        used_group_ids=frozenset(snap["ring"]),
        next_seq=counter + 1,
    )


def record_to_dict(record: RunRecord) -> dict:
    return {
        "v": SCHEMA_VERSION,
        "config": record.config,
        "states": [state_snapshot(s) for s in record.states],
        "change_logs": [[e.to_dict() for e in log] for log in record.change_logs],
        "stalls": [{"time": t, "duration": d} for t, d in record.stalls],
        "unconsumed": [e.to_dict() for e in record.unconsumed],
    }


def dump_record(record: RunRecord | dict, path) -> None:
    doc = record if isinstance(record, dict) else record_to_dict(record)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def load_record(path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise CorruptRecord(f"{path}:{e.lineno}: {e.msg}") from None
    require_shape(doc)
    return doc


def require_shape(doc: dict) -> None:
    """Structural sanity only; semantic checks live in recordcheck."""
    if not isinstance(doc, dict) or doc.get("v") != SCHEMA_VERSION:
        raise CorruptRecord(f"unsupported record version {doc.get('v')!r}"
                            if isinstance(doc, dict) else "record is not an object")
    for key in ("config", "states", "change_logs", "stalls"):
        if key not in doc:
            raise CorruptRecord(f"missing key {key!r}")
    if not doc["states"]:
        raise CorruptRecord("record has no states")
    if len(doc["change_logs"]) != len(doc["states"]) - 1:
        raise CorruptRecord(
            f"{len(doc['change_logs'])} change logs for {len(doc['states'])} states")
    for i, snap in enumerate(doc["states"]):
        for key in ("step", "current", "ring", "members"):
            if key not in snap:
                raise CorruptRecord(f"state {i} missing key {key!r}")
