"""Ring-of-groups rotation state: snapshots, validity checks, counter math.

A rotation state is an immutable snapshot of a worker pool partitioned
into a ring of groups.  Ring order encodes succession (the group at
position k is followed by the group at position k+1, wrapping around),
``current`` names the group performing the task right now, and a worker's
*counter* is the ring distance from the current group to the worker's own
group: the number of tasks until their turn.

States are values.  Every transition builds a new state; nothing here
mutates.  Two bookkeeping fields ride along without taking part in
equality: the set of group ids ever used (so a retired id is never
reissued within a run) and the next free worker sequence number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import UnknownGroup, UnknownWorker

GroupId = str


@dataclass(frozen=True, order=True)
class WorkerId:
    """A worker handle: opaque token plus global arrival sequence number.

    ``seq`` increases in order of first appearance over a whole run and
    breaks ties whenever one member of a group must be singled out
    (splits move the newest workers, donations send the newest worker).
    """

    token: str
    seq: int


class Code(Enum):
    """Validation violation codes."""

    NOT_PARTITION = "NotPartition"
    EMPTY_GROUP = "EmptyGroup"
    NOT_SINGLE_CYCLE = "NotSingleCycle"
    TOO_FEW_GROUPS = "TooFewGroups"
    CURRENT_MISSING = "CurrentMissing"
    FOLLOWS_OVERLAP = "FollowsOverlap"
    FOLLOWS_CURRENT_GONE = "FollowsCurrentGone"
    FOLLOWS_WRONG_SUCCESSOR = "FollowsWrongSuccessor"
    BELOW_FLOOR_DEGRADED = "BelowFloorDegraded"
    REPLAY_MISMATCH = "ReplayMismatch"


@dataclass(frozen=True)
class Violation:
    code: Code
    detail: str

    def __str__(self) -> str:
        return f"{self.code.value}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    """All violations found, not just the first.

    ``violations`` are hard failures.  ``warnings`` carry the soft
    below-floor notes emitted for degraded states (too few workers to
    give every group its minimum); a state with only warnings is valid.
    """

    violations: tuple[Violation, ...] = ()
    warnings: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[Code]:
        return {v.code for v in self.violations}

    def __str__(self) -> str:
        if self.ok and not self.warnings:
            return "ok"
        lines = [str(v) for v in self.violations]
        lines += [f"(warning) {w}" for w in self.warnings]
        return "; ".join(lines)


@dataclass(frozen=True)
class RotationState:
    """Snapshot of the group ring.

    ``ring`` and ``members`` are parallel: ``members[k]`` is the ordered
    member list of ``ring[k]`` (order = insertion into that group).
    """

    ring: tuple[GroupId, ...]
    members: tuple[tuple[WorkerId, ...], ...]
    current: GroupId
    step_index: int = 0
    used_group_ids: frozenset[GroupId] = field(default=frozenset(), compare=False)
    next_seq: int = field(default=1, compare=False)

    # -- shape ---------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.ring)

    @property
    def n(self) -> int:
        return sum(len(ms) for ms in self.members)

    def index_of(self, g: GroupId) -> int:
        try:
            return self.ring.index(g)
        except ValueError:
            raise UnknownGroup(g) from None

    def members_of(self, g: GroupId) -> tuple[WorkerId, ...]:
        return self.members[self.index_of(g)]

    def group_sizes(self) -> dict[GroupId, int]:
        return {g: len(ms) for g, ms in zip(self.ring, self.members)}

    def successor(self, g: GroupId) -> GroupId:
        return self.ring[(self.index_of(g) + 1) % self.m]

    def predecessor(self, g: GroupId) -> GroupId:
        return self.ring[(self.index_of(g) - 1) % self.m]

    # -- workers -------------------------------------------------------

    def tokens(self) -> set[str]:
        return {w.token for ms in self.members for w in ms}

    def has_worker(self, token: str) -> bool:
        return any(w.token == token for ms in self.members for w in ms)

    def group_of(self, token: str) -> GroupId:
        for g, ms in zip(self.ring, self.members):
            if any(w.token == token for w in ms):
                return g
        raise UnknownWorker(token)

    def worker(self, token: str) -> WorkerId:
        for ms in self.members:
            for w in ms:
                if w.token == token:
                    return w
        raise UnknownWorker(token)


def _normalize_members(raw: Iterable) -> tuple[WorkerId, ...]:
    out = []
    for w in raw:
        out.append(w if isinstance(w, WorkerId) else WorkerId(str(w), 0))
    return tuple(out)


def build_state(groups: Sequence[tuple[GroupId, Sequence]],
                current: GroupId,
                step_index: int = 0) -> RotationState | ValidationReport:
    """Build a state whose ring order equals the given list order.

    Returns the state when every validity condition holds, otherwise the
    full :class:`ValidationReport`.  Plain string tokens are accepted for
    workers; they get sequence numbers in order of appearance.
    """
    ring = tuple(g for g, _ in groups)
    members = [_normalize_members(ms) for _, ms in groups]
    # assign sequence numbers to bare tokens in appearance order
    seq = 1 + max((w.seq for ms in members for w in ms), default=0)
    filled = []
    for ms in members:
        row = []
        for w in ms:
            if w.seq == 0:
                w = WorkerId(w.token, seq)
                seq += 1
            row.append(w)
        filled.append(tuple(row))
    state = RotationState(
        ring=ring,
        members=tuple(filled),
        current=current,
        step_index=step_index,
        used_group_ids=frozenset(ring),
        next_seq=seq,
    )
    report = check_state(state)
    return state if report.ok else report


def check_state(state: RotationState, d: int | None = None) -> ValidationReport:
    """Check the structural conditions of a single state.

    With ``d`` given, groups below the floor are reported: as warnings
    when the pool is too small to satisfy the floor at all (n < 2d,
    degraded mode), as hard violations otherwise.
    """
    violations: list[Violation] = []
    warnings: list[Violation] = []

    seen: set[GroupId] = set()
    dupes = set()
    for g in state.ring:
        if g in seen:
            dupes.add(g)
        seen.add(g)
    if dupes:
        violations.append(Violation(
            Code.NOT_SINGLE_CYCLE,
            f"duplicate group ids in ring: {sorted(dupes)}"))
    if len(state.members) != len(state.ring):
        violations.append(Violation(
            Code.NOT_SINGLE_CYCLE,
            f"{len(state.members)} member lists for {len(state.ring)} groups"))

    if state.m < 2:
        violations.append(Violation(
            Code.TOO_FEW_GROUPS, f"|G| = {state.m}, need at least 2"))

    if state.current not in state.ring:
        violations.append(Violation(
            Code.CURRENT_MISSING, f"current group {state.current!r} not in ring"))

    counts: dict[str, int] = {}
    for ms in state.members:
        for w in ms:
            counts[w.token] = counts.get(w.token, 0) + 1
    multi = sorted(t for t, c in counts.items() if c > 1)
    if multi:
        violations.append(Violation(
            Code.NOT_PARTITION, f"workers in more than one group: {multi}"))

    for g, ms in zip(state.ring, state.members):
        if not ms:
            violations.append(Violation(Code.EMPTY_GROUP, f"group {g} is empty"))

    if d is not None and d >= 1:
        degraded = state.n < 2 * d
        for g, ms in zip(state.ring, state.members):
            if 0 < len(ms) < d:
                v = Violation(
                    Code.BELOW_FLOOR_DEGRADED,
                    f"group {g} has {len(ms)} < d={d} members"
                    + (" (degraded: n < 2d)" if degraded else f" while n={state.n} >= 2d"))
                (warnings if degraded else violations).append(v)

    return ValidationReport(tuple(violations), tuple(warnings))


def validate_pair(prev: RotationState, nxt: RotationState) -> ValidationReport:
    """Check that ``nxt`` is a legal follow-up of ``prev``.

    Three conditions: no member of the previous current group performs
    again immediately (empty overlap with the new current group), the
    previous current group still exists, and the new current group is its
    successor in the new ring.
    """
    violations: list[Violation] = []

    prev_tokens = {w.token for w in prev.members_of(prev.current)}
    if nxt.current in nxt.ring:
        overlap = sorted(prev_tokens & {w.token for w in nxt.members_of(nxt.current)})
        if overlap:
            violations.append(Violation(
                Code.FOLLOWS_OVERLAP,
                f"workers of old current group {prev.current} are in new current "
                f"group {nxt.current}: {overlap}"))

    if prev.current not in nxt.ring:
        violations.append(Violation(
            Code.FOLLOWS_CURRENT_GONE,
            f"old current group {prev.current} was eliminated"))
    elif nxt.current != nxt.successor(prev.current):
        violations.append(Violation(
            Code.FOLLOWS_WRONG_SUCCESSOR,
            f"new current group is {nxt.current}, expected successor "
            f"{nxt.successor(prev.current)} of {prev.current}"))

    return ValidationReport(tuple(violations))


def counter_of_group(state: RotationState, g: GroupId) -> int:
    """Ring distance from the current group to ``g`` (0 for current)."""
    return (state.index_of(g) - state.index_of(state.current)) % state.m


def counter_of_worker(state: RotationState, w: WorkerId | str) -> int:
    token = w.token if isinstance(w, WorkerId) else w
    return counter_of_group(state, state.group_of(token))


def advance_current(state: RotationState) -> RotationState:
    """Move the current group forward one ring position."""
    return RotationState(
        ring=state.ring,
        members=state.members,
        current=state.successor(state.current),
        step_index=state.step_index + 1,
        used_group_ids=state.used_group_ids,
        next_seq=state.next_seq,
    )
