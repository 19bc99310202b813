"""Quantifies the two sides of the restructuring tradeoff for one run:
how many groups the rotation kept alive (fewer groups = each worker
performs more often) versus how much restructuring churn the workers
absorbed.

The stress proxy per worker and transition is a weighted sum of three
observable effects: the worker's countdown dropping below what the
previous state promised (their turn arrives early - the canonical
stressor), the countdown rising (their turn is delayed), and being moved
to another group at all.  Workers arriving or departing in a transition
carry no stress for it; the model concerns the workers who stay.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .errors import CorruptRecord, InvalidPair
from .generator import RunRecord
from .operators import ChangeLog, Donated, Joined, Split
from .state import RotationState, counter_of_group, validate_pair

CSV_COLUMNS = [
    "run_id", "choose", "find_order", "horizon", "d", "max_multiplier", "seed",
    "mean_m", "burden", "total_drop", "total_rise", "total_moves",
    "stress_score", "splits", "joins", "donations", "stall_time", "error",
]


@dataclass(frozen=True)
class StressWeights:
    """Linear stress model weights; all non-negative.

    ``beta`` defaults low: whether a delayed turn stresses anyone is an
    open question, so rises are reported but barely scored by default.
    """

    alpha: float = 1.0   # per unit of counter drop
    beta: float = 0.25   # per unit of counter rise
    gamma: float = 0.5   # per group move

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ValueError("stress weights must be >= 0")


@dataclass(frozen=True)
class WorkerStress:
    """One worker's experience of one transition."""

    token: str
    expected_counter: int
    actual_counter: int
    drop: int
    rise: int
    moved: bool
    score: float


def transition_stress(prev: RotationState, nxt: RotationState,
                      weights: StressWeights, log: ChangeLog
                      ) -> dict[str, WorkerStress]:
    """Per-worker stress for one published transition.

    A worker's expected counter is last state's counter minus one, except
    for the group that just performed, which expects to wait a full lap
    of the new ring.  The achieved counter comes from the new state.
    """
    pair = validate_pair(prev, nxt)
    if not pair.ok:
        raise InvalidPair(str(pair))

    moved_tokens: set[str] = set()
    for e in log:
        if isinstance(e, (Split, Joined)):
            moved_tokens.update(w.token for w in e.moved)
        elif isinstance(e, Donated):
            moved_tokens.add(e.worker.token)

    prev_group = {w.token: g for g, ms in zip(prev.ring, prev.members) for w in ms}
    out: dict[str, WorkerStress] = {}
    for g, ms in zip(nxt.ring, nxt.members):
        actual = counter_of_group(nxt, g)
        for w in ms:
            if w.token not in prev_group:
                continue  # arrived this transition
            before = counter_of_group(prev, prev_group[w.token])
            expected = nxt.m - 1 if before == 0 else before - 1
            drop = max(0, expected - actual)
            rise = max(0, actual - expected)
            moved = prev_group[w.token] != g and w.token in moved_tokens
            score = weights.alpha * drop + weights.beta * rise + weights.gamma * moved
            out[w.token] = WorkerStress(w.token, expected, actual,
                                        drop, rise, moved, score)
    return out


@dataclass
class RunReport:
    """Aggregated tradeoff metrics for one run."""

    group_counts: list[int]
    mean_m: float
    min_m: int
    max_m: int
    burden: float                      # mean of 1/m over states
    per_worker: dict[str, dict]        # token -> stress/moves/drops/rises/tasks
    total_drop: int
    total_rise: int
    total_moves: int
    stress_score: float
    stress_quantiles: dict[str, float]
    splits: int
    joins: int
    donations: int
    inserted: int
    removed: int
    stall_time: float
    transitions: int

    def to_dict(self) -> dict:
        return {
            "group_counts": self.group_counts,
            "mean_m": self.mean_m,
            "min_m": self.min_m,
            "max_m": self.max_m,
            "burden": self.burden,
            "per_worker": {t: self.per_worker[t] for t in sorted(self.per_worker)},
            "totals": {"drop": self.total_drop, "rise": self.total_rise,
                       "moves": self.total_moves, "stress": self.stress_score},
            "stress_quantiles": self.stress_quantiles,
            "counts": {"splits": self.splits, "joins": self.joins,
                       "donations": self.donations, "inserted": self.inserted,
                       "removed": self.removed},
            "stall_time": self.stall_time,
            "transitions": self.transitions,
        }

    def csv_row(self, run_id: str, config: dict, error: str = "") -> dict:
        find = config.get("find", {})
        return {
            "run_id": run_id,
            "choose": config.get("choose", ""),
            "find_order": find.get("order", ""),
            "horizon": find.get("horizon", ""),
            "d": config.get("d", ""),
            "max_multiplier": config.get("max_multiplier", ""),
            "seed": config.get("seed", ""),
            "mean_m": repr(self.mean_m),
            "burden": repr(self.burden),
            "total_drop": self.total_drop,
            "total_rise": self.total_rise,
            "total_moves": self.total_moves,
            "stress_score": repr(self.stress_score),
            "splits": self.splits,
            "joins": self.joins,
            "donations": self.donations,
            "stall_time": repr(self.stall_time),
            "error": error,
        }


def summarize_run(record: RunRecord, weights: StressWeights | None = None
                  ) -> RunReport:
    """Deterministic aggregation of a whole run record."""
    weights = weights or StressWeights()
    if not record.states:
        raise CorruptRecord("record has no states")
    if len(record.change_logs) != len(record.states) - 1:
        raise CorruptRecord("change log count does not match state count")

    group_counts = [s.m for s in record.states]
    burden = statistics.fmean(1.0 / m for m in group_counts)

    per_worker: dict[str, dict] = {}

    def slot(token: str) -> dict:
        return per_worker.setdefault(
            token, {"stress": 0.0, "moves": 0, "drops": 0, "rises": 0, "tasks": 0})

    for state in record.states:
        for w in state.members_of(state.current):
            slot(w.token)["tasks"] += 1

    total_drop = total_rise = total_moves = 0
    stress_total = 0.0
    splits = joins = donations = inserted = removed = 0
    for prev, nxt, log in zip(record.states, record.states[1:], record.change_logs):
        for e in log:
            name = type(e).__name__
            if name == "Split":
                splits += 1
            elif name == "Joined":
                joins += 1
            elif name == "Donated":
                donations += 1
            elif name == "Inserted":
                inserted += 1
            elif name == "Removed":
                removed += 1
        for token, ws in transition_stress(prev, nxt, weights, log).items():
            s = slot(token)
            s["stress"] += ws.score
            s["moves"] += int(ws.moved)
            s["drops"] += ws.drop
            s["rises"] += ws.rise
            total_drop += ws.drop
            total_rise += ws.rise
            total_moves += int(ws.moved)
            stress_total += ws.score

    series = sorted(s["stress"] for s in per_worker.values()) or [0.0]
    if len(series) >= 2:
        q1, q2, q3 = statistics.quantiles(series, n=4, method="inclusive")
    else:
        q1 = q2 = q3 = series[0]
    quantiles = {"min": series[0], "p25": q1, "p50": q2, "p75": q3,
                 "max": series[-1]}

    return RunReport(
        group_counts=group_counts,
        mean_m=statistics.fmean(group_counts),
        min_m=min(group_counts),
        max_m=max(group_counts),
        burden=burden,
        per_worker=per_worker,
        total_drop=total_drop,
        total_rise=total_rise,
        total_moves=total_moves,
        stress_score=stress_total,
        stress_quantiles=quantiles,
        splits=splits,
        joins=joins,
        donations=donations,
        inserted=inserted,
        removed=removed,
        stall_time=sum(d for _, d in record.stalls),
        transitions=len(record.change_logs),
    )


def summarize_record_dict(doc: dict, weights: StressWeights | None = None
                          ) -> RunReport:
    """Summarize a record loaded from disk (snapshot form)."""
    from .records import snapshot_to_state

    rec = RunRecord(config=doc.get("config", {}))
    seq_of: dict[str, int] = {}
    for snap in doc["states"]:
        state = snapshot_to_state(snap, seq_of)
        for ms in state.members:
            for w in ms:
                seq_of[w.token] = w.seq
        rec.states.append(state)
    rec.change_logs = [_entries_from_dicts(log) for log in doc["change_logs"]]
    rec.stalls = [(s["time"], s["duration"]) for s in doc.get("stalls", [])]
    return summarize_run(rec, weights)


def _entries_from_dicts(entries: list[dict]) -> ChangeLog:
    from .operators import (DegradedEntered, Donated, Inserted, Joined,
                            Removed, Split, Stalled)
    from .state import WorkerId

    def wid(token: str) -> WorkerId:
        return WorkerId(token, 0)

    out = []
    for e in entries:
        op = e["op"]
        if op == "inserted":
            out.append(Inserted(wid(e["worker"]), e["group"]))
        elif op == "removed":
            out.append(Removed(wid(e["worker"]), e["group"]))
        elif op == "split":
            out.append(Split(e["group"], e["new_group"],
                             tuple(wid(t) for t in e["moved"])))
        elif op == "joined":
            out.append(Joined(e["survivor"], e["absorbed"],
                              tuple(wid(t) for t in e["moved"])))
        elif op == "donated":
            out.append(Donated(wid(e["worker"]), e["from"], e["to"]))
        elif op == "degraded":
            out.append(DegradedEntered(e["group"]))
        elif op == "stalled":
            out.append(Stalled())
        else:
            raise CorruptRecord(f"unknown change log op {op!r}")
    return tuple(out)


__all__ = [
    "CSV_COLUMNS", "StressWeights", "WorkerStress", "RunReport",
    "transition_stress", "summarize_run", "summarize_record_dict",
]
