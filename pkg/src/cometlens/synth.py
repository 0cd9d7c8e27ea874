"""Synthetic corpora with a known focus schedule.

A schedule tiles ``[0, span]`` into segments; in each segment every actor is
either silent or assigned one object.  Each actor's assigned stretches are
tiled by back-to-back units whose boundaries follow a Poisson renewal
process (exponential unit durations with mean ``60 / unit_rate`` seconds),
so an assigned actor is continuously active.  Jitter shifts the time at
which an actor changes focus by a uniform integer offset in
``[-jitter, +jitter]`` ms, independently per actor and change point.

The ground truth is derived from the unperturbed schedule alone.

Randomness comes from :class:`random.Random` (Mersenne Twister MT19937)
seeded with ``seed``; draws happen in a fixed order so a seed always yields
the same bytes.
"""

from __future__ import annotations

import json
import random
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .episodes import Block, Episode, Label
from .errors import SynthSpecError
from .model import (
    AnnotationUnit,
    Corpus,
    FocusClass,
    GestureAction,
    GestureAttrs,
    GestureKind,
    Granularity,
    Modality,
    Modulation,
    ObjectRef,
    TimeInterval,
    Seconds,
    ToolRef,
    VerbalAction,
    format_ms,
    seconds_to_ms,
)


@dataclass(frozen=True)
class Segment:
    interval: TimeInterval
    assign: dict[str, ObjectRef]


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    actors: tuple[str, ...]
    span_ms: int
    schedule: tuple[Segment, ...]
    unit_rate: float = 12.0
    modality_mix: float = 0.3
    jitter_ms: int = 0
    point_mix: float = 0.0
    granularity: Granularity = Granularity.PROBLEM

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise SynthSpecError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if len(set(self.actors)) != len(self.actors) or not all(self.actors):
            raise SynthSpecError("actors must be distinct non-empty tokens")
        if self.span_ms <= 0:
            raise SynthSpecError("span must be positive")
        for name in ("modality_mix", "point_mix"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise SynthSpecError(f"{name} must lie in [0, 1], got {value}")
        if self.unit_rate < 0:
            raise SynthSpecError("unit_rate must be non-negative")
        if self.jitter_ms < 0:
            raise SynthSpecError("jitter must be non-negative")
        if not self.schedule:
            raise SynthSpecError("schedule is empty")
        cursor = 0
        for seg in self.schedule:
            if seg.interval.start_ms != cursor:
                raise SynthSpecError(
                    f"schedule must tile the span: segment starts at {format_ms(seg.interval.start_ms)},"
                    f" expected {format_ms(cursor)}"
                )
            if seg.interval.duration_ms <= 2 * self.jitter_ms:
                raise SynthSpecError(
                    f"segment at {format_ms(cursor)} is not longer than twice the jitter"
                )
            unknown = set(seg.assign) - set(self.actors)
            if unknown:
                raise SynthSpecError(f"schedule assigns unknown actors {sorted(unknown)}")
            cursor = seg.interval.end_ms
        if cursor != self.span_ms:
            raise SynthSpecError(f"schedule ends at {format_ms(cursor)}, span is {format_ms(self.span_ms)}")

    @classmethod
    def from_dict(cls, doc: dict) -> "SynthSpec":
        try:
            schedule = tuple(
                Segment(
                    TimeInterval(seconds_to_ms(seg["start"]), seconds_to_ms(seg["end"])),
                    {actor: ObjectRef.parse(tok) for actor, tok in sorted(seg.get("assign", {}).items())},
                )
                for seg in doc["schedule"]
            )
            return cls(
                seed=int(doc.get("seed", 0)),
                actors=tuple(doc["actors"]),
                span_ms=seconds_to_ms(doc["span"]),
                schedule=schedule,
                unit_rate=float(doc.get("unit_rate", 12.0)),
                modality_mix=float(doc.get("modality_mix", 0.3)),
                jitter_ms=seconds_to_ms(doc.get("jitter", 0)),
                point_mix=float(doc.get("point_mix", 0.0)),
                granularity=Granularity(str(doc.get("granularity", "PROBLEM")).upper()),
            )
        except SynthSpecError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise SynthSpecError(f"malformed synth spec: {exc}") from None

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "actors": list(self.actors),
            "span": format_ms(self.span_ms),
            "unit_rate": self.unit_rate,
            "modality_mix": self.modality_mix,
            "jitter": format_ms(self.jitter_ms),
            "point_mix": self.point_mix,
            "granularity": self.granularity.value,
            "schedule": [
                {
                    "start": format_ms(seg.interval.start_ms),
                    "end": format_ms(seg.interval.end_ms),
                    "assign": {a: o.token for a, o in sorted(seg.assign.items())},
                }
                for seg in self.schedule
            ],
        }

    def with_seed(self, seed: int) -> "SynthSpec":
        return SynthSpec(**{**self.__dict__, "seed": seed})


def load_spec(path: str | Path) -> SynthSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SynthSpecError(f"spec is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    return SynthSpec.from_dict(doc)


@dataclass(frozen=True)
class PlantedCoalition:
    interval: TimeInterval
    block: tuple[str, ...]
    focus: str


@dataclass
class GroundTruth:
    episodes: list[Episode] = field(default_factory=list)
    coalitions: list[PlantedCoalition] = field(default_factory=list)

    def as_dict(self) -> dict:
        """Plain data; times are :class:`Seconds` (integer ms)."""
        return {
            "episodes": [
                {
                    "start": Seconds(ep.interval.start_ms),
                    "end": Seconds(ep.interval.end_ms),
                    "label": ep.label.value,
                    "blocks": [{"actors": list(b.actors), "focus": b.focus_label} for b in ep.blocks],
                }
                for ep in self.episodes
            ],
            "coalitions": [
                {
                    "start": Seconds(c.interval.start_ms),
                    "end": Seconds(c.interval.end_ms),
                    "block": list(c.block),
                    "focus": c.focus,
                }
                for c in self.coalitions
            ],
        }


def ground_truth(spec: SynthSpec) -> GroundTruth:
    """Expected episodes and coalitions, read straight off the schedule."""
    if spec.unit_rate == 0:
        return GroundTruth()
    raw: list[Episode] = []
    for seg in spec.schedule:
        groups: dict[FocusClass, list[str]] = defaultdict(list)
        for actor, obj in seg.assign.items():
            groups[FocusClass.of(obj, spec.granularity)].append(actor)
        blocks = tuple(sorted(Block(tuple(sorted(actors)), (fc,)) for fc, actors in groups.items()))
        n = len(seg.assign)
        label = Label.IDLE if n == 0 else Label.SOLO if n == 1 else Label.INT if len(blocks) == 1 else Label.NON_INT
        if raw and raw[-1].label == label and raw[-1].blocks == blocks:
            raw[-1] = Episode(TimeInterval(raw[-1].interval.start_ms, seg.interval.end_ms), label, blocks)
        else:
            raw.append(Episode(seg.interval, label, blocks))
    while raw and raw[0].label is Label.IDLE:
        raw.pop(0)
    while raw and raw[-1].label is Label.IDLE:
        raw.pop()
    coalitions = []
    for ep in raw:
        if ep.label is not Label.NON_INT:
            continue
        largest = max(len(b.actors) for b in ep.blocks)
        if largest >= 2:
            coalitions.extend(
                PlantedCoalition(ep.interval, b.actors, b.focus_label) for b in ep.blocks if len(b.actors) == largest
            )
    return GroundTruth(raw, coalitions)


_VERBAL_CHOICES = ("GEN", "GEN", "GEN", "EVAL+", "EVAL-", "EVAL0", "INFO", "INTERP")
_GESTURE_CHOICES = (
    "Point", "Delimit_2d", "Delimit_3d", "Graph_trac", "Text_trac",
    "Moving", "Rotating", "Overlaying", "Movem_2d", "Position",
)
_PHRASES = (
    "yes",
    "that's true",
    'on both sides "here"',
    "déjà vu, peut-être",
    "u:h (..) okay",
    "one is waiting over here",
)
_DOCUMENTS = ("P1", "C16", "C16+P1", "C_Virgin")
_TOOLS = (None, "hand", "hand", "pen", "pencil", "ruler", "eraser")
_AREAS = (None, None, "center", "left", "right")


def _actor_runs(spec: SynthSpec, actor: str, rng: random.Random) -> list[tuple[int, int, ObjectRef]]:
    """The actor's assigned pieces, one per segment, with jittered change points.

    Only boundaries where the actor's assignment changes are perturbed, so
    with zero jitter every piece coincides with its scheduled segment.
    """
    edges = []
    prev = None
    for seg in spec.schedule:
        obj = seg.assign.get(actor)
        start = seg.interval.start_ms
        if obj != prev and start > 0 and spec.jitter_ms:
            start += rng.randint(-spec.jitter_ms, spec.jitter_ms)
        edges.append((start, obj))
        prev = obj
    edges.append((spec.span_ms, None))
    return [(s, e, obj) for (s, obj), (e, _) in zip(edges, edges[1:]) if obj is not None]


def _cuts(start: int, end: int, rate_per_min: float, rng: random.Random) -> list[int]:
    mean_ms = 60000.0 / rate_per_min
    cuts = []
    t = float(start)
    while True:
        t += rng.expovariate(1.0 / mean_ms)
        c = round(t)
        if c >= end:
            return cuts
        if c > start and (not cuts or c > cuts[-1]):
            cuts.append(c)


def _make_unit(uid, actor, interval, obj, rng: random.Random, gestural: bool) -> AnnotationUnit:
    if not gestural:
        modulation = Modulation.REQUEST if rng.random() < 0.1 else Modulation.ASSERT
        return AnnotationUnit(
            uid, actor, Modality.VERBAL, interval, obj,
            modulation=modulation,
            v_action=VerbalAction.parse(rng.choice(_VERBAL_CHOICES)),
            transcription=rng.choice(_PHRASES),
        )
    tool = rng.choice(_TOOLS)
    attrs = GestureAttrs(
        obj1=rng.choice(_DOCUMENTS),
        obj2=rng.choice((None, None, "C16_over_P1")),
        tool=ToolRef.parse(tool) if tool else None,
        area=rng.choice(_AREAS),
    )
    return AnnotationUnit(
        uid, actor, Modality.GESTURAL, interval, obj,
        g_action=GestureAction.parse(rng.choice(_GESTURE_CHOICES)), attrs=attrs,
    )


def generate(spec: SynthSpec) -> tuple[Corpus, GroundTruth]:
    rng = random.Random(spec.seed)
    raw = []  # (interval, actor, obj, gestural, is_point)
    if spec.unit_rate > 0:
        for actor in spec.actors:
            for start, end, obj in _actor_runs(spec, actor, rng):
                edges = [start, *_cuts(start, end, spec.unit_rate, rng), end]
                for lo, hi in zip(edges, edges[1:]):
                    raw.append((TimeInterval(lo, hi), actor, obj, rng.random() < spec.modality_mix, False))
                    if spec.point_mix and rng.random() < spec.point_mix and hi - lo > 1:
                        t = rng.randint(lo + 1, hi - 1)
                        raw.append((TimeInterval(t, t), actor, obj, True, True))
    raw.sort(key=lambda r: (r[0].start_ms, r[0].end_ms, r[1]))
    units = []
    for n, (interval, actor, obj, gestural, is_point) in enumerate(raw, start=1):
        uid = f"s{n:05d}"
        if is_point:
            units.append(AnnotationUnit(
                uid, actor, Modality.GESTURAL, interval, obj,
                g_action=GestureAction(GestureKind.POINT), attrs=GestureAttrs("P1", tool=ToolRef.parse("hand")),
            ))
        else:
            units.append(_make_unit(uid, actor, interval, obj, rng, gestural))
    meta = {"source": "synth", "seed": str(spec.seed)}
    return Corpus.build(units, actors=spec.actors, meta=meta), ground_truth(spec)


_OBJECT_POOL = (
    "SOL:a@PB1", "SOL:b@PB1", "SOL:c@PB2", "SOL:d@PB3", "DAT@PB1", "DAT:d1",
    "TASK:t1", "GOAL", "OBJ:o1", "PROC:p1",
)


def random_spec(
    seed: int,
    n_actors: int = 3,
    n_segments: int = 4,
    min_len: float = 5.0,
    max_len: float = 20.0,
    silence: float = 0.2,
    **overrides,
) -> SynthSpec:
    """A random schedule over a mixed object pool, for property tests."""
    rng = random.Random(seed ^ 0x5EED)
    actors = tuple("ABCDEFGH"[:n_actors])
    cursor = 0
    schedule = []
    for _ in range(n_segments):
        length = seconds_to_ms(round(rng.uniform(min_len, max_len), 3))
        assign = {
            a: ObjectRef.parse(rng.choice(_OBJECT_POOL)) for a in actors if rng.random() >= silence
        }
        schedule.append(Segment(TimeInterval(cursor, cursor + length), assign))
        cursor += length
    params = dict(seed=seed, actors=actors, span_ms=cursor, schedule=tuple(schedule))
    params.update(overrides)
    return SynthSpec(**params)


def planted_coalition_spec(seed: int, jitter_ms: int = 0, n_actors: int = 3, **overrides) -> SynthSpec:
    """A schedule alternating whole-group work and planted coalitions.

    Segments last 20-60 s; every other segment opposes a block of two actors
    to the rest (with four actors, half the time the rest is another pair).
    """
    rng = random.Random(seed ^ 0xC0A1)
    actors = tuple("ABCDEFGH"[:n_actors])
    problems = ["PB1", "PB2", "PB3", "PB4"]
    cursor = 0
    schedule = []
    n_segments = rng.randint(3, 6)
    for i in range(n_segments):
        length = rng.randint(20_000, 60_000)
        rng.shuffle(problems)
        if i % 2 == 1:
            members = rng.sample(actors, 2)
            rest = [a for a in actors if a not in members]
            assign = {a: ObjectRef.parse(f"SOL:x@{problems[0]}") for a in members}
            other = rng.choice(("problem", "task", "domain"))
            for j, a in enumerate(rest):
                if other == "problem":
                    tok = f"SOL:y@{problems[1 + (j if len(rest) > 2 else 0)]}"
                else:
                    tok = "TASK:t1" if other == "task" else "PROC:p1"
                assign[a] = ObjectRef.parse(tok)
        else:
            assign = {a: ObjectRef.parse(f"SOL:z@{problems[0]}") for a in actors}
        schedule.append(Segment(TimeInterval(cursor, cursor + length), assign))
        cursor += length
    params = dict(seed=seed, actors=actors, span_ms=cursor, schedule=tuple(schedule), jitter_ms=jitter_ms)
    params.update(overrides)
    return SynthSpec(**params)
