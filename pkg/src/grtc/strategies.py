"""Pluggable pieces of the update operators: choose, split, find (join
rules live with the operators since they rewrite the ring).

All variants except ``random`` are pure functions of the state; the
random variant draws from one named, seeded stream owned by the run, so
swapping the seed changes nothing but random-choice decisions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import GrtcError
from .state import GroupId, RotationState, WorkerId, counter_of_group

CHOOSE_KINDS = ("random", "farthest", "concentrated", "balanced", "hybrid")
FIND_ORDERS = ("pred-first", "succ-first")


@dataclass
class StrategySet:
    """The strategy knobs for one run.

    ``split`` and ``join`` have a single implementation each (half/half
    by seniority; rule-based survivor selection) and are named here only
    so a strategy set is self-describing in run records.
    """

    choose: str = "balanced"
    find_order: str = "pred-first"
    split: str = "half-and-half"
    join: str = "rule-based"
    rng: random.Random = field(default_factory=random.Random, repr=False, compare=False)

    def __post_init__(self):
        if self.choose not in CHOOSE_KINDS:
            raise GrtcError(f"unknown choose strategy {self.choose!r}")
        if self.find_order not in FIND_ORDERS:
            raise GrtcError(f"unknown find order {self.find_order!r}")

    @classmethod
    def seeded(cls, choose: str, find_order: str, seed) -> "StrategySet":
        return cls(choose=choose, find_order=find_order,
                   rng=random.Random(f"{seed}:choose"))


def choose_group(state: RotationState, policy, kind: str,
                 rng: random.Random | None = None) -> GroupId:
    """Pick the group that receives an inserted worker.

    random        uniform over ring groups (seeded stream)
    farthest      largest counter, i.e. most tasks away from performing
    concentrated  largest group; ties to the smallest counter
    balanced      smallest group; ties to the largest counter
    hybrid        smallest group at or below the floor d if any
                  (balanced tie-breaks), otherwise farthest
    """
    if kind == "random":
        if rng is None:
            raise GrtcError("random choose strategy needs an rng stream")
        return state.ring[rng.randrange(state.m)]
    if kind == "farthest":
        return max(state.ring, key=lambda g: counter_of_group(state, g))
    if kind == "concentrated":
        return max(state.ring,
                   key=lambda g: (len(state.members_of(g)),
                                  -counter_of_group(state, g),
                                  _rev(g)))
    if kind == "balanced":
        return min(state.ring,
                   key=lambda g: (len(state.members_of(g)),
                                  -counter_of_group(state, g),
                                  g))
    if kind == "hybrid":
        at_risk = [g for g in state.ring if len(state.members_of(g)) <= policy.d]
        if at_risk:
            return min(at_risk,
                       key=lambda g: (len(state.members_of(g)),
                                      -counter_of_group(state, g),
                                      g))
        return choose_group(state, policy, "farthest")
    raise GrtcError(f"unknown choose strategy {kind!r}")


def _rev(g: str):
    # inverted lexicographic key, so max() tie-breaks toward the smaller id
    return tuple(-ord(c) for c in g)


def partition_for_split(members: list[WorkerId] | tuple[WorkerId, ...]
                        ) -> tuple[list[WorkerId], list[WorkerId]]:
    """Halve a seniority-ordered member list: earliest keep, newest move.

    The stay half gets the extra worker on odd sizes.
    """
    if len(members) < 2:
        raise GrtcError(f"cannot split {len(members)} members")
    keep = (len(members) + 1) // 2
    return list(members[:keep]), list(members[keep:])


def find_donor(state: RotationState, policy, deficient: GroupId,
               order: str = "pred-first",
               horizon: int | None = None,
               min_size: int | None = None,
               tainted: frozenset[str] | None = None,
               protected: GroupId | None = None) -> GroupId | None:
    """Nearest-first alternating ring scan for a group that can spare a worker.

    Starting next to the deficient group and widening outward (predecessor
    then successor per hop for ``pred-first``, the reverse for
    ``succ-first``), return the first group of size at least ``min_size``
    (default d+1, so the donor stays at the floor).  A candidate whose
    newest member performed in the previous published state is skipped
    when the deficient group is the one performing next (``protected``):
    donating there would make that worker perform twice in a row.
    Returns None when no group qualifies within ``horizon`` hops.
    """
    if min_size is None:
        min_size = policy.d + 1
    if tainted is None:
        tainted = frozenset(w.token for w in state.members_of(state.current))
    if protected is None:
        protected = state.successor(state.current)

    i = state.index_of(deficient)
    m = state.m
    limit = min(horizon if horizon is not None else m - 1, m - 1)
    seen: set[int] = {i}
    first, second = (-1, +1) if order == "pred-first" else (+1, -1)
    for hop in range(1, limit + 1):
        for direction in (first, second):
            j = (i + direction * hop) % m
            if j in seen:
                continue
            seen.add(j)
            candidate = state.ring[j]
            ms = state.members_of(candidate)
            if len(ms) < min_size:
                continue
            if deficient == protected and max(ms, key=lambda w: w.seq).token in tainted:
                continue
            return candidate
    return None
