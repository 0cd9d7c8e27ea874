"""Descriptive statistics over an analysed corpus.

All durations are integer milliseconds; means are rounded half-to-even to
the millisecond only when rendered.
"""

from __future__ import annotations

import csv
import io
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations_with_replacement

from .coalitions import CoalitionEpisode
from .episodes import Episode, Label
from .errors import NoVerbalError
from .focus import ClassifiedPair, Verdict
from .intervals import Relation
from .model import Corpus, Modality, Space, format_ms

HIST_BIN_MS = 100

_MODALITY_NAMES = {Modality.VERBAL: "VERBAL", Modality.GESTURAL: "GESTURAL"}
_SPACE_NAMES = {Space.PROBLEM_SOLUTION: "PROBLEM", Space.GROUP: "GROUP", Space.DOMAIN: "DOMAIN"}


def _pair_key(names: list[str], a: str, b: str) -> str:
    a, b = sorted((a, b), key=names.index)
    return f"{a}×{b}"


MODALITY_PAIRS = tuple(f"{a}×{b}" for a, b in combinations_with_replacement(_MODALITY_NAMES.values(), 2))
SPACE_PAIRS = tuple(f"{a}×{b}" for a, b in combinations_with_replacement(_SPACE_NAMES.values(), 2))


@dataclass
class Cell:
    count: int = 0
    near: int = 0
    overlap_ms: int = 0


@dataclass
class CoOccurrenceMatrix:
    cells: dict[tuple[str, str, str], Cell]

    @property
    def total(self) -> int:
        return sum(c.count for c in self.cells.values())

    def rows(self) -> list[dict]:
        return [
            {
                "modalities": mp,
                "verdict": v,
                "spaces": sp,
                "count": cell.count,
                "near": cell.near,
                "overlap_ms": cell.overlap_ms,
            }
            for (mp, v, sp), cell in self.cells.items()
        ]


def co_occurrence(pairs: list[ClassifiedPair], corpus: Corpus) -> CoOccurrenceMatrix:
    """Counts over (modality pair, verdict, space pair); every cell is present."""
    mod_names = list(_MODALITY_NAMES.values())
    space_names = list(_SPACE_NAMES.values())
    cells = {
        (mp, v.value, sp): Cell()
        for mp in MODALITY_PAIRS
        for v in Verdict
        for sp in SPACE_PAIRS
    }
    for cp in pairs:
        a, b = corpus.unit(cp.pair.unit_a), corpus.unit(cp.pair.unit_b)
        key = (
            _pair_key(mod_names, _MODALITY_NAMES[a.modality], _MODALITY_NAMES[b.modality]),
            cp.verdict.verdict.value,
            _pair_key(space_names, _SPACE_NAMES[a.object.space], _SPACE_NAMES[b.object.space]),
        )
        cell = cells[key]
        cell.count += 1
        if cp.pair.relation is Relation.NEAR:
            cell.near += 1
        else:
            cell.overlap_ms += cp.pair.shared.duration_ms
    return CoOccurrenceMatrix(cells)


class TransitionScope(str, Enum):
    PER_ACTOR = "PER_ACTOR"
    POOLED = "POOLED"


VERBAL_TOKENS = ("GEN", "EVAL+", "EVAL-", "EVAL0", "INFO", "INTERP")
STATES = tuple(f"{t}/{s}" for t in VERBAL_TOKENS for s in _SPACE_NAMES.values())
POOLED_KEY = "*"


@dataclass
class TransitionMatrix:
    """Counts of consecutive verbal-unit transitions, keyed by sequence.

    Sequences are per actor for ``PER_ACTOR`` and a single pooled sequence
    (key ``"*"``) otherwise.
    """

    scope: TransitionScope
    counts: dict[str, Counter] = field(default_factory=dict)
    occurrences: dict[str, Counter] = field(default_factory=dict)

    def combined(self) -> Counter:
        total: Counter = Counter()
        for c in self.counts.values():
            total.update(c)
        return total

    def row_totals(self, key: str | None = None) -> dict[str, int]:
        counts = self.combined() if key is None else self.counts[key]
        rows: Counter = Counter()
        for (src, _), n in counts.items():
            rows[src] += n
        return dict(rows)

    @property
    def total(self) -> int:
        return sum(self.combined().values())

    def rows(self) -> list[dict]:
        out = []
        for key in sorted(self.counts):
            cells = sorted(self.counts[key].items(), key=lambda kv: (STATES.index(kv[0][0]), STATES.index(kv[0][1])))
            for (src, dst), n in cells:
                out.append({"scope": self.scope.value, "sequence": key, "from": src, "to": dst, "count": n})
        return out


def verbal_state(unit) -> str:
    return f"{unit.v_action.token}/{_SPACE_NAMES[unit.object.space]}"


def transitions(corpus: Corpus, scope: TransitionScope | str = TransitionScope.POOLED) -> TransitionMatrix:
    """Transitions between consecutive verbal units ordered by start (ties by id).

    Overlapping verbal units of different actors are ordered by start time
    for the pooled sequence.
    """
    scope = TransitionScope(scope)
    verbal = sorted(
        (u for u in corpus.units if u.modality is Modality.VERBAL),
        key=lambda u: (u.start_ms, u.unit_id),
    )
    if not verbal:
        raise NoVerbalError("corpus has no verbal units")
    sequences: dict[str, list] = defaultdict(list)
    for u in verbal:
        sequences[u.actor if scope is TransitionScope.PER_ACTOR else POOLED_KEY].append(u)
    matrix = TransitionMatrix(scope)
    for key, seq in sorted(sequences.items()):
        states = [verbal_state(u) for u in seq]
        matrix.counts[key] = Counter(zip(states, states[1:]))
        matrix.occurrences[key] = Counter(states)
    return matrix


def _mean_ms(total: int, count: int) -> int:
    return round(Fraction(total, count))


@dataclass
class LabelDurations:
    count: int
    total_ms: int
    histogram: dict[int, int]

    @property
    def mean_ms(self) -> int:
        return _mean_ms(self.total_ms, self.count)


@dataclass
class DurationReport:
    by_label: dict[str, LabelDurations]
    coalitions_by_type: dict[str, LabelDurations]

    @property
    def total_ms(self) -> int:
        return sum(d.total_ms for d in self.by_label.values())

    def as_dict(self) -> dict:
        def render(d: dict[str, LabelDurations]):
            return {
                key: {
                    "count": ld.count,
                    "total_ms": ld.total_ms,
                    "mean_ms": ld.mean_ms,
                    "histogram_100ms": {str(b): n for b, n in sorted(ld.histogram.items())},
                }
                for key, ld in d.items()
            }

        return {
            "bin_ms": HIST_BIN_MS,
            "total_ms": self.total_ms,
            "by_label": render(self.by_label),
            "coalitions_by_type": render(self.coalitions_by_type),
        }


def _aggregate(items) -> dict[str, LabelDurations]:
    agg: dict[str, LabelDurations] = {}
    for key, duration in items:
        ld = agg.setdefault(key, LabelDurations(0, 0, {}))
        ld.count += 1
        ld.total_ms += duration
        b = (duration // HIST_BIN_MS) * HIST_BIN_MS
        ld.histogram[b] = ld.histogram.get(b, 0) + 1
    return agg


def durations(episodes: list[Episode], coalitions: list[CoalitionEpisode]) -> DurationReport:
    label_order = [lab.value for lab in Label]
    by_label = _aggregate((ep.label.value, ep.duration_ms) for ep in episodes)
    by_label = {k: by_label[k] for k in label_order if k in by_label}
    by_type = _aggregate((c.disalignment.value, c.duration_ms) for c in coalitions)
    return DurationReport(by_label, dict(sorted(by_type.items())))


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def co_occurrence_csv(matrix: CoOccurrenceMatrix) -> str:
    rows = [dict(r, overlap=format_ms(r.pop("overlap_ms"))) for r in matrix.rows()]
    return to_csv(rows, ["modalities", "verdict", "spaces", "count", "near", "overlap"])


def transitions_csv(matrix: TransitionMatrix) -> str:
    return to_csv(matrix.rows(), ["scope", "sequence", "from", "to", "count"])


def durations_csv(report: DurationReport) -> str:
    rows = []
    for group, table in (("label", report.by_label), ("coalition", report.coalitions_by_type)):
        for key, ld in table.items():
            rows.append({
                "group": group,
                "key": key,
                "count": ld.count,
                "total": format_ms(ld.total_ms),
                "mean": format_ms(ld.mean_ms),
            })
    return to_csv(rows, ["group", "key", "count", "total", "mean"])


def histogram_csv(report: DurationReport) -> str:
    rows = [
        {"label": key, "bin_start": format_ms(b), "bin_end": format_ms(b + HIST_BIN_MS), "count": n}
        for key, ld in report.by_label.items()
        for b, n in sorted(ld.histogram.items())
    ]
    return to_csv(rows, ["label", "bin_start", "bin_end", "count"])


def unit_counts(corpus: Corpus) -> dict:
    """Counts of units by actor/channel, predicate and modulation."""
    by_actor: dict[str, Counter] = defaultdict(Counter)
    actions: Counter = Counter()
    modulations: Counter = Counter()
    for u in corpus.units:
        by_actor[u.actor][u.channel.value] += 1
        actions[u.action_token] += 1
        if u.modulation is not None:
            modulations[u.modulation.name] += 1
    return {
        "total": len(corpus.units),
        "by_actor": {a: dict(sorted(by_actor[a].items())) for a in sorted(by_actor)},
        "by_action": dict(sorted(actions.items())),
        "by_modulation": dict(sorted(modulations.items())),
    }
