"""Turns an initial state, a task schedule and a worker change stream
into a full rotation: one published state per executed task time, each
following its predecessor.

A batch (all changes since the last task time) is applied worker-at-a-
time, then reconciled, then the current group advances.  If no valid
follow-up state can be built, the rotation stalls: nothing is published,
the pending changes stay queued, and the whole batch is retried at the
next task time together with whatever arrived meanwhile.  Stalls are
recorded as data, never treated as failures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InconsistentEvent, InvalidState, OrderError, StallError
from .operators import (
    BatchContext,
    ChangeLog,
    OperatorPolicy,
    Stalled,
    _note_degraded,
    _repair_deficiency,
    insert_worker,
    remove_worker,
)
from .state import (
    RotationState,
    WorkerId,
    advance_current,
    build_state,
    check_state,
    validate_pair,
)
from .strategies import StrategySet
from .traces import WorkerEvent


@dataclass(frozen=True)
class TaskSchedule:
    """Strictly increasing task times, explicit or periodic."""

    times: tuple[float, ...]

    def __post_init__(self):
        if not self.times:
            raise ValueError("schedule needs at least one task time")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("task times must be strictly increasing")
        if self.times[0] <= 0:
            raise ValueError("task times must be positive")

    @classmethod
    def explicit(cls, times) -> "TaskSchedule":
        return cls(tuple(float(t) for t in times))

    @classmethod
    def periodic(cls, interval: float, count: int,
                 start: float | None = None) -> "TaskSchedule":
        if count < 1:
            raise ValueError("count must be >= 1")
        if interval <= 0:
            raise ValueError("interval must be positive")
        t0 = interval if start is None else start
        return cls(tuple(t0 + k * interval for k in range(count)))


@dataclass
class RunRecord:
    """Everything one run produced: states, per-transition change logs,
    stall intervals and the config echo.  ``states[0]`` is the initial
    state; ``change_logs[i]`` explains ``states[i] -> states[i+1]``."""

    config: dict = field(default_factory=dict)
    states: list[RotationState] = field(default_factory=list)
    change_logs: list[ChangeLog] = field(default_factory=list)
    stalls: list[tuple[float, float]] = field(default_factory=list)
    unconsumed: list[WorkerEvent] = field(default_factory=list)

    @property
    def final_state(self) -> RotationState:
        return self.states[-1]


def partition_events(events: list[WorkerEvent], t_prev: float,
                     t_i: float) -> list[WorkerEvent]:
    """Events in the half-open window (t_prev, t_i], original order kept."""
    return [e for e in events if t_prev < e.t <= t_i]


def build_initial_state(workers: list[WorkerId | str],
                        policy: OperatorPolicy) -> RotationState:
    """Deal the starting roster round-robin into as many groups as the
    floor allows (at least two).  Fewer than two workers cannot form a
    ring at all and raises StallError; fewer than 2d run degraded."""
    roster = [w if isinstance(w, WorkerId) else WorkerId(w, i + 1)
              for i, w in enumerate(workers)]
    n = len(roster)
    if n < 2:
        raise StallError(f"cannot build a ring from {n} worker(s)")
    m = max(2, n // policy.d)
    groups: list[list[WorkerId]] = [[] for _ in range(m)]
    for i, w in enumerate(roster):
        groups[i % m].append(w)
    built = build_state([(f"g{k + 1}", ms) for k, ms in enumerate(groups)],
                        current="g1")
    if not isinstance(built, RotationState):
        raise InvalidState(built)
    return built


def _reconcile(state: RotationState, policy: OperatorPolicy,
               strategies: StrategySet, ctx: BatchContext
               ) -> tuple[RotationState, ChangeLog]:
    """Batch-end repair pass.

    Fixes what per-event repairs could not: transiently emptied groups,
    deficiencies whose repair was blocked mid-batch, and groups left
    below the floor although the pool has grown back to n >= 2d
    (leaving degraded mode).  Donations and joins here follow the same
    rules as the per-event repairs; what cannot be repaired is left for
    the publish-time checks to turn into a stall.
    """
    sizes = [len(ms) for ms in state.members]
    if min(sizes) >= policy.d or (0 not in sizes and sum(sizes) < 2 * policy.d):
        return state, ()  # nothing to repair: the overwhelmingly common case

    log: list = []
    hopeless: set[str] = set()

    def targets() -> list[str]:
        sizes = [len(ms) for ms in state.members]
        cur = state.ring.index(state.current)
        order = [(state.ring[(cur + k) % state.m], sizes[(cur + k) % state.m])
                 for k in range(state.m)]
        empty = [g for g, size in order if size == 0]
        if empty:
            return [g for g in empty if g not in hopeless]
        if sum(sizes) >= 2 * policy.d:
            return [g for g, size in order if size < policy.d and g not in hopeless]
        return []

    while True:
        todo = targets()
        if not todo:
            break
        g = todo[0]
        state, entries, outcome = _repair_deficiency(state, policy, strategies, g, ctx)
        log.extend(entries)
        if outcome == "blocked":
            hopeless.add(g)
        elif outcome == "degraded" and state.members_of(g):
            if state.n < 2 * policy.d:
                log.extend(_note_degraded(ctx, g))
            else:
                hopeless.add(g)
    ctx.unrepaired |= hopeless
    return state, tuple(log)


def next_state(state: RotationState, policy: OperatorPolicy,
               strategies: StrategySet, batch: list[WorkerEvent]
               ) -> tuple[RotationState, ChangeLog]:
    """One transition: apply a batch of arrivals/departures in order,
    reconcile, advance the current group and check the result.

    Raises StallError when the batch cannot end in a valid state that
    follows the input state, e.g. when too few workers remain or the
    only repair would rotate a just-performed worker straight back in.
    """
    ctx = BatchContext.for_state(state, lenient=True)
    out = state
    log: list = []
    for ev in batch:
        if ev.op == "arrive":
            if out.has_worker(ev.worker):
                raise InconsistentEvent(f"arrival of present worker {ev.worker}")
            w = WorkerId(ev.worker, out.next_seq)
            out, entries = insert_worker(out, policy, strategies, w, ctx)
        elif ev.op == "depart":
            if not out.has_worker(ev.worker):
                raise InconsistentEvent(f"departure of absent worker {ev.worker}")
            out, entries = remove_worker(out, policy, strategies, ev.worker, ctx)
        else:
            raise InconsistentEvent(f"unknown event op {ev.op!r}")
        log.extend(entries)

    out, entries = _reconcile(out, policy, strategies, ctx)
    log.extend(entries)

    published = advance_current(out)
    report = check_state(published)
    if not report.ok:
        raise StallError(f"no valid state constructible: {report}")
    if published.n >= 2 * policy.d:
        floor_breakers = [g for g in published.ring
                          if len(published.members_of(g)) < policy.d]
        if floor_breakers:
            raise StallError(
                f"groups {floor_breakers} cannot reach the floor d={policy.d} "
                "without breaking the rotation constraints")
    pair = validate_pair(state, published)
    if not pair.ok:
        raise StallError(f"candidate state does not follow its predecessor: {pair}")
    return published, tuple(log)


def run_rotation(initial: RotationState, policy: OperatorPolicy,
                 strategies: StrategySet, schedule: TaskSchedule,
                 events: list[WorkerEvent],
                 config: dict | None = None) -> RunRecord:
    """Drive the full rotation over the schedule.

    The window for task time t_i is (t_{i-1}, t_i] with t_0 = 0.  On a
    stall the window's events stay queued and are retried, merged with
    the next window, until a valid state can be built again.
    """
    report = check_state(initial)
    if not report.ok:
        raise InvalidState(report)
    for a, b in zip(events, events[1:]):
        if b.t < a.t:
            raise OrderError(f"events out of order at t={b.t}")

    record = RunRecord(config=dict(config or {}))
    record.states.append(initial)

    current = initial
    backlog: list[WorkerEvent] = []
    stall_start: float | None = None
    t_prev = 0.0
    for t in schedule.times:
        batch = backlog + partition_events(events, t_prev, t)
        t_prev = t
        try:
            nxt, log = next_state(current, policy, strategies, batch)
        except StallError:
            backlog = batch
            if stall_start is None:
                stall_start = t
            continue
        if stall_start is not None:
            record.stalls.append((stall_start, t - stall_start))
            stall_start = None
            log = (Stalled(),) + log
        record.states.append(nxt)
        record.change_logs.append(log)
        current = nxt
        backlog = []

    if stall_start is not None:
        record.stalls.append((stall_start, schedule.times[-1] - stall_start))
    record.unconsumed = backlog + [e for e in events if e.t > schedule.times[-1]]
    return record


__all__ = [
    "TaskSchedule", "RunRecord", "partition_events", "build_initial_state",
    "next_state", "run_rotation",
]
