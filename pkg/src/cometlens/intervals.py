"""Temporal relations between units: parallel pairs and the slice timeline.

Active-set membership is closed at the start and open at the end, so
back-to-back turns never share a slice (they still pair up as NEAR).  Zero-length units are
closed points: a point at ``t`` overlaps every unit whose closed interval
contains ``t``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum

from .errors import EmptyCorpusError
from .model import AnalysisConfig, AnnotationUnit, Corpus, TimeInterval


class Relation(str, Enum):
    SIMULTANEOUS = "SIMULTANEOUS"
    OVERLAP = "OVERLAP"
    NEAR = "NEAR"


@dataclass(frozen=True, order=True)
class ParallelPair:
    unit_a: str
    unit_b: str
    relation: Relation
    shared: TimeInterval

    @property
    def is_near(self) -> bool:
        return self.relation is Relation.NEAR


def relate(a: TimeInterval, b: TimeInterval, gap_tolerance_ms: int) -> tuple[Relation, TimeInterval] | None:
    """Relation between two intervals, or ``None`` if they are too far apart.

    ``shared`` is the intersection for SIMULTANEOUS/OVERLAP and the gap
    between the two intervals for NEAR.
    """
    if a == b:
        return Relation.SIMULTANEOUS, a
    lo = max(a.start_ms, b.start_ms)
    hi = min(a.end_ms, b.end_ms)
    if hi > lo or (hi == lo and (a.is_point or b.is_point)):
        return Relation.OVERLAP, TimeInterval(lo, hi)
    if lo - hi <= gap_tolerance_ms:
        return Relation.NEAR, TimeInterval(hi, lo)
    return None


def make_pair(a: AnnotationUnit, b: AnnotationUnit, gap_tolerance_ms: int) -> ParallelPair | None:
    rel = relate(a.interval, b.interval, gap_tolerance_ms)
    if rel is None:
        return None
    first, second = sorted((a.unit_id, b.unit_id))
    return ParallelPair(first, second, rel[0], rel[1])


def find_parallel_pairs(corpus: Corpus, config: AnalysisConfig) -> list[ParallelPair]:
    """All unit pairs that overlap, coincide, or lie within the gap tolerance.

    Sweep over start times with a min-heap of ``end + tolerance``: a unit stays
    a candidate until a later unit starts strictly after its inflated end, so
    every unit left in the active set when another starts is a genuine pair.
    ``O(n log n + k)`` for ``k`` reported pairs.
    """
    tol = config.gap_tolerance_ms
    pairs: list[ParallelPair] = []
    expiry: list[tuple[int, int]] = []
    active: dict[int, AnnotationUnit] = {}
    for idx, unit in enumerate(corpus.units):  # corpus units are sorted by start
        while expiry and expiry[0][0] < unit.start_ms:
            _, gone = heapq.heappop(expiry)
            del active[gone]
        for other in active.values():
            pair = make_pair(other, unit, tol)
            if pair is None:  # pragma: no cover - excluded by the expiry rule
                raise AssertionError(f"sweep produced a non-pair {other.unit_id}/{unit.unit_id}")
            pairs.append(pair)
        active[idx] = unit
        heapq.heappush(expiry, (unit.end_ms + tol, idx))
    pairs.sort(key=lambda p: (p.unit_a, p.unit_b))
    return pairs


@dataclass(frozen=True)
class Slice:
    interval: TimeInterval
    active: tuple[str, ...]


@dataclass(frozen=True)
class Timeline:
    boundaries: tuple[int, ...]
    slices: tuple[Slice, ...]


def build_timeline(corpus: Corpus) -> Timeline:
    """Cut the corpus span at every unit start and end.

    Between consecutive boundaries ``b0 < b1`` the active set is every unit
    with ``start <= b0`` and ``end >= b1``.  When point units sit on a
    boundary ``t``, a zero-length slice ``[t, t]`` is inserted whose active
    set is the points at ``t`` plus every unit whose closed interval holds ``t``.
    """
    if not corpus.units:
        raise EmptyCorpusError("cannot build a timeline for an empty corpus")
    starts: dict[int, list[AnnotationUnit]] = {}
    ends: dict[int, list[AnnotationUnit]] = {}
    points: dict[int, list[AnnotationUnit]] = {}
    for u in corpus.units:
        if u.interval.is_point:
            points.setdefault(u.start_ms, []).append(u)
        else:
            starts.setdefault(u.start_ms, []).append(u)
            ends.setdefault(u.end_ms, []).append(u)
    boundaries = sorted(set(starts) | set(ends) | set(points))

    slices: list[Slice] = []
    active: set[str] = set()
    for i, b in enumerate(boundaries):
        starting = {u.unit_id for u in starts.get(b, ())}
        ending = {u.unit_id for u in ends.get(b, ())}
        if b in points:
            here = active | starting | {u.unit_id for u in points[b]}
            slices.append(Slice(TimeInterval(b, b), tuple(sorted(here))))
        active = (active - ending) | starting
        if i + 1 < len(boundaries):
            slices.append(Slice(TimeInterval(b, boundaries[i + 1]), tuple(sorted(active))))
    return Timeline(tuple(boundaries), tuple(slices))
