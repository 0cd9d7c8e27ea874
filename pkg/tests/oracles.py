"""Deliberately naive reference implementations used as test oracles."""

from __future__ import annotations

from itertools import combinations

from cometlens.model import Corpus, FocusClass, Granularity


def brute_force_pairs(corpus: Corpus, gap_tolerance_ms: int) -> set[tuple]:
    """Every unordered pair checked directly against the relation definitions."""
    found = set()
    for a, b in combinations(corpus.units, 2):
        ia, ib = a.interval, b.interval
        inter_lo = max(ia.start_ms, ib.start_ms)
        inter_hi = min(ia.end_ms, ib.end_ms)
        if ia == ib:
            rel, shared = "SIMULTANEOUS", (ia.start_ms, ia.end_ms)
        elif inter_hi > inter_lo:
            rel, shared = "OVERLAP", (inter_lo, inter_hi)
        elif inter_hi == inter_lo and (ia.start_ms == ia.end_ms or ib.start_ms == ib.end_ms):
            rel, shared = "OVERLAP", (inter_lo, inter_hi)
        elif inter_lo - inter_hi <= gap_tolerance_ms:
            rel, shared = "NEAR", (inter_hi, inter_lo)
        else:
            continue
        ua, ub = sorted((a.unit_id, b.unit_id))
        found.add((ua, ub, rel, shared))
    return found


def _active_at(corpus: Corpus, t: int, point: bool):
    """Units active at instant ``t``: half-open membership, closed for points.

    ``point`` asks for the zero-length slice at ``t``, where every unit whose
    closed interval contains ``t`` counts.
    """
    if point:
        return [u for u in corpus.units if u.start_ms <= t <= u.end_ms]
    return [u for u in corpus.units if u.start_ms <= t < u.end_ms]


def _partition(units, level: Granularity):
    foci: dict[str, set] = {}
    for u in units:
        foci.setdefault(u.actor, set()).add(FocusClass.of(u.object, level).key)
    groups: dict = {}
    split = []
    for actor, keys in foci.items():
        if len(keys) == 1:
            groups.setdefault(next(iter(keys)), []).append(actor)
        else:
            split.append(((actor,), tuple(sorted(keys))))
    return sorted([(tuple(sorted(g)), (key,)) for key, g in groups.items()] + split)


def brute_force_segments(corpus: Corpus, level: Granularity) -> list[tuple[int, int, str, list]]:
    """(start, end, label, partition) by probing every elementary interval directly."""
    times = sorted({u.start_ms for u in corpus.units} | {u.end_ms for u in corpus.units})
    points = {u.start_ms for u in corpus.units if u.start_ms == u.end_ms}
    probes = []
    for i, t in enumerate(times):
        if t in points:
            probes.append((t, t, _active_at(corpus, t, True)))
        if i + 1 < len(times):
            probes.append((t, times[i + 1], _active_at(corpus, t, False)))
    out = []
    for lo, hi, units in probes:
        part = _partition(units, level)
        n_actors = sum(len(actors) for actors, _ in part)
        label = "IDLE" if n_actors == 0 else "SOLO" if n_actors == 1 else "INT" if len(part) == 1 else "NON_INT"
        if out and out[-1][2] == label and out[-1][3] == part:
            out[-1] = (out[-1][0], hi, label, part)
        else:
            out.append((lo, hi, label, part))
    return out
