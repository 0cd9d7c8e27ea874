"""Domain types for coded multimodal design-meeting corpora.

Every unit is one coded action by one actor in one modality over a time
interval.  Verbal units follow the ``MOD[ACT/OBJ]`` shape (modulation,
predicate, argument); graphico-gestural units carry an ``Action(Object)``
predicate plus the document, tool and table area they were performed on.

Times are integer milliseconds throughout so that comparisons and report
bytes never depend on float rounding.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .errors import ConfigError, ModelError

TIME_RESOLUTION_MS = 1

_DECIMAL_RE = re.compile(r"^(\d+)(?:\.(\d{1,3}))?$")
_CLOCK_RE = re.compile(r"^(\d{1,2}):([0-5]\d):([0-5]\d)(?:\.(\d{1,3}))?$")
_TOKEN_RE = re.compile(r"^[A-Za-z0-9_.+\-]+$")


def parse_time(text: str) -> int:
    """Parse decimal seconds (``43707.25``) or a clock time (``12:08:27.250``) to ms.

    Clock times are seconds since midnight.  More than three decimals is an
    error rather than a silent rounding.
    """
    text = text.strip()
    m = _DECIMAL_RE.match(text)
    if m:
        frac = (m.group(2) or "").ljust(3, "0")
        return int(m.group(1)) * 1000 + int(frac)
    m = _CLOCK_RE.match(text)
    if m:
        hh, mm, ss = int(m.group(1)), int(m.group(2)), int(m.group(3))
        frac = (m.group(4) or "").ljust(3, "0")
        return ((hh * 60 + mm) * 60 + ss) * 1000 + int(frac)
    raise ValueError(f"unparseable time {text!r}")


def format_ms(ms: int) -> str:
    """Fixed three-decimal seconds, e.g. ``43707.200``."""
    sign = "-" if ms < 0 else ""
    ms = abs(ms)
    return f"{sign}{ms // 1000}.{ms % 1000:03d}"


class Seconds(int):
    """Milliseconds that the report writer renders as seconds with three decimals."""


def seconds_to_ms(seconds: float | int | str) -> int:
    if isinstance(seconds, str):
        return parse_time(seconds)
    if isinstance(seconds, int):
        return seconds * 1000
    return round(seconds * 1000)


@dataclass(frozen=True, order=True)
class TimeInterval:
    """Closed-open interval ``[start_ms, end_ms)``; zero length marks an instant."""

    start_ms: int
    end_ms: int

    def __post_init__(self):
        if not isinstance(self.start_ms, int) or not isinstance(self.end_ms, int):
            raise ModelError("interval bounds must be integer milliseconds", code="E_TIME")
        if self.start_ms < 0:
            raise ModelError(f"negative start time {self.start_ms} ms", code="E_TIME")
        if self.end_ms < self.start_ms:
            raise ModelError(
                f"interval ends before it starts ({format_ms(self.start_ms)} > {format_ms(self.end_ms)})",
                code="E_TIME",
            )

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms

    @property
    def is_point(self) -> bool:
        return self.start_ms == self.end_ms

    def __str__(self) -> str:
        return f"[{format_ms(self.start_ms)}, {format_ms(self.end_ms)}]"


class Modality(str, Enum):
    VERBAL = "V"
    GESTURAL = "G"


class Channel(str, Enum):
    """Semiotic channel; graphical tracing is split out of the gestural modality."""

    VERBAL = "VERBAL"
    GRAPHICAL = "GRAPHICAL"
    GESTURAL = "GESTURAL"


class Modulation(str, Enum):
    ASSERT = "A"
    REQUEST = "REQ"


class VerbalKind(str, Enum):
    GEN = "GEN"
    EVAL = "EVAL"
    INFO = "INFO"
    INTERP = "INTERP"


class Polarity(str, Enum):
    POS = "+"
    NEG = "-"
    NEUTRAL = "0"


@dataclass(frozen=True)
class VerbalAction:
    kind: VerbalKind
    polarity: Polarity | None = None

    def __post_init__(self):
        if (self.kind is VerbalKind.EVAL) != (self.polarity is not None):
            raise ModelError("polarity is required for EVAL and forbidden otherwise", code="E_CODE")

    @property
    def token(self) -> str:
        """Report key: ``GEN``, ``EVAL+``, ``EVAL-``, ``EVAL0``, ``INFO``, ``INTERP``."""
        if self.polarity is None:
            return self.kind.value
        return self.kind.value + self.polarity.value

    @classmethod
    def parse(cls, token: str) -> "VerbalAction":
        t = token.strip().upper()
        if t.startswith("EVAL"):
            suffix = t[4:]
            for pol in Polarity:
                if suffix == pol.value:
                    return cls(VerbalKind.EVAL, pol)
            raise ValueError(f"EVAL needs a polarity suffix (+, -, 0), got {token!r}")
        if t == "INT":
            # "INT" is reserved for the integrated-episode label
            raise ValueError("use INTERP for the interpret predicate, not INT")
        try:
            return cls(VerbalKind(t))
        except ValueError:
            raise ValueError(f"unknown verbal action {token!r}") from None


class GestureKind(str, Enum):
    POINT = "POINT"
    DELIM2D = "DELIM2D"
    DELIM3D = "DELIM3D"
    GRAPHTRAC = "GRAPHTRAC"
    TEXTTRAC = "TEXTTRAC"
    MOVING = "MOVING"
    ROTATING = "ROTATING"
    OVERLAYING = "OVERLAYING"
    EXT = "EXT"


# canonical spelling written back to files
GESTURE_TOKENS = {
    GestureKind.POINT: "Point",
    GestureKind.DELIM2D: "Delimit_2d",
    GestureKind.DELIM3D: "Delimit_3d",
    GestureKind.GRAPHTRAC: "Graph_trac",
    GestureKind.TEXTTRAC: "Text_trac",
    GestureKind.MOVING: "Moving",
    GestureKind.ROTATING: "Rotating",
    GestureKind.OVERLAYING: "Overlaying",
}

_GESTURE_ALIASES = {
    "point": GestureKind.POINT,
    "delimit2d": GestureKind.DELIM2D,
    "delim2d": GestureKind.DELIM2D,
    "delimit3d": GestureKind.DELIM3D,
    "delim3d": GestureKind.DELIM3D,
    "graphtrac": GestureKind.GRAPHTRAC,
    "texttrac": GestureKind.TEXTTRAC,
    "moving": GestureKind.MOVING,
    "rotating": GestureKind.ROTATING,
    "overlaying": GestureKind.OVERLAYING,
}


def _known_gesture(token: str) -> GestureKind | None:
    return _GESTURE_ALIASES.get(token.replace("_", "").replace("-", "").lower())


@dataclass(frozen=True)
class GestureAction:
    kind: GestureKind
    ext_token: str | None = None

    def __post_init__(self):
        if self.kind is GestureKind.EXT:
            if not self.ext_token:
                raise ModelError("EXT gesture needs its original token", code="E_CODE")
            if _known_gesture(self.ext_token) is not None:
                raise ModelError(f"{self.ext_token!r} is a known gesture, not EXT", code="E_CODE")
        elif self.ext_token is not None:
            raise ModelError("ext_token is only allowed on EXT gestures", code="E_CODE")

    @property
    def token(self) -> str:
        if self.kind is GestureKind.EXT:
            return self.ext_token
        return GESTURE_TOKENS[self.kind]

    @property
    def channel(self) -> Channel:
        if self.kind in (GestureKind.GRAPHTRAC, GestureKind.TEXTTRAC):
            return Channel.GRAPHICAL
        return Channel.GESTURAL

    @classmethod
    def parse(cls, token: str) -> "GestureAction":
        token = token.strip()
        if not token:
            raise ValueError("empty gesture action")
        kind = _known_gesture(token)
        if kind is None:
            return cls(GestureKind.EXT, token)
        return cls(kind)


class Category(str, Enum):
    DAT = "DAT"
    SOL = "SOL"
    OBJ = "OBJ"
    PROC = "PROC"
    GOAL = "GOAL"
    TASK = "TASK"


class Space(str, Enum):
    PROBLEM_SOLUTION = "PROBLEM_SOLUTION"
    GROUP = "GROUP"
    DOMAIN = "DOMAIN"


SPACE_OF_CATEGORY = {
    Category.DAT: Space.PROBLEM_SOLUTION,
    Category.SOL: Space.PROBLEM_SOLUTION,
    Category.GOAL: Space.GROUP,
    Category.TASK: Space.GROUP,
    Category.OBJ: Space.DOMAIN,
    Category.PROC: Space.DOMAIN,
}

SPACE_ORDER = {space: i for i, space in enumerate(Space)}


class Granularity(str, Enum):
    INSTANCE = "INSTANCE"
    PROBLEM = "PROBLEM"
    SPACE = "SPACE"


def _check_token(value: str | None, what: str) -> None:
    if value is not None and not _TOKEN_RE.match(value):
        raise ModelError(f"invalid {what} token {value!r}", code="E_OBJECT")


@dataclass(frozen=True, order=True)
class ObjectRef:
    """The coded argument of a unit.

    Solutions are indexed by the problem they answer (``SOL:a@PB1``); problem
    data may optionally be attached to a problem (``DAT@PB1``).
    """

    category: Category
    problem_id: str | None = None
    solution_id: str | None = None
    instance_id: str | None = None

    def __post_init__(self):
        for value, what in (
            (self.problem_id, "problem"),
            (self.solution_id, "solution"),
            (self.instance_id, "instance"),
        ):
            _check_token(value, what)
        if self.category is Category.SOL:
            if not self.problem_id or not self.solution_id:
                raise ModelError("SOL needs both a solution id and a problem id", code="E_OBJECT")
            if self.instance_id is not None:
                raise ModelError("SOL is identified by solution@problem, not an instance", code="E_OBJECT")
        else:
            if self.solution_id is not None:
                raise ModelError(f"{self.category.value} cannot carry a solution id", code="E_OBJECT")
            if self.problem_id is not None and self.category is not Category.DAT:
                raise ModelError(f"{self.category.value} cannot carry a problem id", code="E_OBJECT")

    @property
    def space(self) -> Space:
        return SPACE_OF_CATEGORY[self.category]

    @property
    def token(self) -> str:
        if self.category is Category.SOL:
            return f"SOL:{self.solution_id}@{self.problem_id}"
        out = self.category.value
        if self.problem_id is not None:
            out += f"@{self.problem_id}"
        if self.instance_id is not None:
            out += f":{self.instance_id}"
        return out

    def __str__(self) -> str:
        return self.token

    @classmethod
    def parse(cls, token: str) -> "ObjectRef":
        """Parse ``DAT[@pb][:inst]``, ``SOL:sid@pb`` or ``OBJ|PROC|GOAL|TASK[:inst]``."""
        token = token.strip()
        head, sep, rest = token.partition(":")
        if head == "SOL":
            sid, at, pb = rest.partition("@")
            if not sep or not at or not sid or not pb:
                raise ModelError(f"SOL object needs SOL:<solution>@<problem>, got {token!r}", code="E_OBJECT")
            return cls(Category.SOL, problem_id=pb, solution_id=sid)
        cat_text, at, pb = head.partition("@")
        try:
            category = Category(cat_text)
        except ValueError:
            raise ModelError(f"unknown object category in {token!r}", code="E_OBJECT") from None
        if at and category is not Category.DAT:
            raise ModelError(f"only DAT may carry a problem id: {token!r}", code="E_OBJECT")
        if category is Category.SOL:
            raise ModelError(f"SOL object needs SOL:<solution>@<problem>, got {token!r}", code="E_OBJECT")
        if (at and not pb) or (sep and not rest):
            raise ModelError(f"empty id in object token {token!r}", code="E_OBJECT")
        return cls(category, problem_id=pb or None, instance_id=rest or None)


def space_of(obj: ObjectRef) -> Space:
    return SPACE_OF_CATEGORY[obj.category]


def match_key(obj: ObjectRef, level: Granularity) -> tuple:
    """Equivalence-class key of ``obj`` at ``level``; equal keys means "same category".

    Absent ids become ``""`` (never a valid id) so keys are totally ordered.
    """
    if level is Granularity.INSTANCE:
        return (obj.category.value, obj.problem_id or "", obj.solution_id or "", obj.instance_id or "")
    if level is Granularity.PROBLEM:
        if obj.category is Category.SOL:
            return ("SOL", obj.problem_id)
        if obj.category is Category.DAT and obj.problem_id is not None:
            return ("DAT", "@", obj.problem_id)
        return (obj.category.value, obj.instance_id or "")
    return (space_of(obj).value,)


def objects_match(a: ObjectRef, b: ObjectRef, level: Granularity) -> bool:
    return match_key(a, level) == match_key(b, level)


@dataclass(frozen=True, order=True)
class FocusClass:
    """Representative of an object equivalence class at one granularity."""

    key: tuple
    label: str
    space: Space

    @classmethod
    def of(cls, obj: ObjectRef, level: Granularity) -> "FocusClass":
        if level is Granularity.INSTANCE:
            label = obj.token
        elif level is Granularity.PROBLEM:
            if obj.category is Category.SOL:
                label = obj.problem_id
            elif obj.category is Category.DAT and obj.problem_id is not None:
                label = f"DAT@{obj.problem_id}"
            else:
                label = obj.category.value + (f":{obj.instance_id}" if obj.instance_id else "")
        else:
            label = obj.space.value
        return cls(match_key(obj, level), label, obj.space)

    @property
    def problem(self) -> str | None:
        """Problem the class belongs to, when it lies in the problem/solution space."""
        if self.space is not Space.PROBLEM_SOLUTION:
            return None
        if self.key[0] == "SOL":
            return self.key[1]
        if self.key[0] == "DAT" and len(self.key) == 3 and self.key[1] == "@":
            return self.key[2]
        if self.key[0] == "DAT" and len(self.key) == 4:
            return self.key[1] or None
        return None


class Tool(str, Enum):
    HAND = "hand"
    PEN = "pen"
    PENCIL = "pencil"
    RULER = "ruler"
    OTHER = "other"


@dataclass(frozen=True)
class ToolRef:
    kind: Tool
    token: str | None = None

    def __post_init__(self):
        if self.kind is Tool.OTHER:
            if not self.token:
                raise ModelError("OTHER tool needs a token", code="E_CODE")
            if self.token.lower() in {t.value for t in Tool if t is not Tool.OTHER}:
                raise ModelError(f"{self.token!r} is a known tool, not OTHER", code="E_CODE")
        elif self.token is not None:
            raise ModelError("token is only allowed on OTHER tools", code="E_CODE")

    @property
    def text(self) -> str:
        return self.token if self.kind is Tool.OTHER else self.kind.value

    @classmethod
    def parse(cls, token: str) -> "ToolRef":
        token = token.strip()
        if not token:
            raise ValueError("empty tool")
        try:
            kind = Tool(token.lower())
        except ValueError:
            return cls(Tool.OTHER, token)
        if kind is Tool.OTHER:
            return cls(Tool.OTHER, token)
        return cls(kind)


@dataclass(frozen=True)
class GestureAttrs:
    obj1: str
    obj2: str | None = None
    tool: ToolRef | None = None
    area: str | None = None

    def __post_init__(self):
        if not self.obj1:
            raise ModelError("graphico-gestural units need a document (obj1)", code="E_FIELDGROUP")


@dataclass(frozen=True)
class AnnotationUnit:
    unit_id: str
    actor: str
    modality: Modality
    interval: TimeInterval
    object: ObjectRef
    modulation: Modulation | None = None
    v_action: VerbalAction | None = None
    g_action: GestureAction | None = None
    attrs: GestureAttrs | None = None
    transcription: str | None = None

    def __post_init__(self):
        if not self.unit_id or not self.actor:
            raise ModelError("unit_id and actor are required", code="E_FIELDGROUP")
        if self.modality is Modality.VERBAL:
            if self.v_action is None:
                raise ModelError(f"{self.unit_id}: verbal unit needs a verbal action", code="E_FIELDGROUP")
            if self.g_action is not None or self.attrs is not None:
                raise ModelError(f"{self.unit_id}: gestural fields on a verbal unit", code="E_FIELDGROUP")
            if self.modulation is None:
                object.__setattr__(self, "modulation", Modulation.ASSERT)
        else:
            if self.g_action is None or self.attrs is None:
                raise ModelError(f"{self.unit_id}: gestural unit needs an action and obj1", code="E_FIELDGROUP")
            if self.v_action is not None or self.modulation is not None:
                raise ModelError(f"{self.unit_id}: verbal fields on a gestural unit", code="E_FIELDGROUP")

    @property
    def start_ms(self) -> int:
        return self.interval.start_ms

    @property
    def end_ms(self) -> int:
        return self.interval.end_ms

    @property
    def action_token(self) -> str:
        return self.v_action.token if self.v_action is not None else self.g_action.token

    @property
    def channel(self) -> Channel:
        if self.modality is Modality.VERBAL:
            return Channel.VERBAL
        return self.g_action.channel

    def sort_key(self) -> tuple[int, int, str]:
        return (self.interval.start_ms, self.interval.end_ms, self.unit_id)


@dataclass(frozen=True)
class Corpus:
    """Time-ordered units plus the actor roster; build with :meth:`build`."""

    units: tuple[AnnotationUnit, ...]
    actors: frozenset[str]
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        units = tuple(sorted(self.units, key=AnnotationUnit.sort_key))
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "actors", frozenset(self.actors))
        object.__setattr__(self, "meta", dict(sorted(self.meta.items())))
        seen = set()
        for u in units:
            if u.unit_id in seen:
                raise ModelError(f"duplicate unit id {u.unit_id!r}", code="E_DUPID")
            seen.add(u.unit_id)
            if u.actor not in self.actors:
                raise ModelError(f"unit {u.unit_id!r} has undeclared actor {u.actor!r}", code="E_ACTOR")
        object.__setattr__(self, "_by_id", {u.unit_id: u for u in units})

    @classmethod
    def build(
        cls,
        units: Iterable[AnnotationUnit],
        actors: Iterable[str] | None = None,
        meta: Mapping[str, str] | None = None,
    ) -> "Corpus":
        units = tuple(units)
        roster = set(actors) if actors is not None else set()
        if actors is None:
            roster.update(u.actor for u in units)
        return cls(units, frozenset(roster), dict(meta or {}))

    def __len__(self) -> int:
        return len(self.units)

    def unit(self, unit_id: str) -> AnnotationUnit:
        return self._by_id[unit_id]

    def __contains__(self, unit_id: str) -> bool:
        return unit_id in self._by_id

    @property
    def span(self) -> TimeInterval | None:
        if not self.units:
            return None
        return TimeInterval(
            min(u.start_ms for u in self.units),
            max(u.end_ms for u in self.units),
        )

    def without_actor(self, actor: str) -> "Corpus":
        return Corpus.build(
            (u for u in self.units if u.actor != actor),
            actors=self.actors - {actor},
            meta=self.meta,
        )


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs of one analysis run; echoed verbatim into every report.

    ``include_near`` lets gap-tolerant (NEAR) pairs count in the alignment
    summary; they are always listed and always excluded from segmentation.
    """

    granularity: Granularity = Granularity.PROBLEM
    gap_tolerance_ms: int = 1000
    min_episode_ms: int = 0
    include_near: bool = False
    time_resolution_ms: int = TIME_RESOLUTION_MS

    def __post_init__(self):
        if not isinstance(self.granularity, Granularity):
            try:
                object.__setattr__(self, "granularity", Granularity(str(self.granularity).upper()))
            except ValueError:
                raise ConfigError(f"unknown granularity {self.granularity!r}") from None
        for name in ("gap_tolerance_ms", "min_episode_ms"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ConfigError(f"{name} must be a non-negative integer, got {value!r}")
        if self.time_resolution_ms != TIME_RESOLUTION_MS:
            raise ConfigError("time resolution is fixed at 1 ms")

    @classmethod
    def from_seconds(
        cls,
        granularity: Granularity | str = Granularity.PROBLEM,
        gap_tolerance: float | str = 1.0,
        min_episode_duration: float | str = 0.0,
        include_near: bool = False,
    ) -> "AnalysisConfig":
        try:
            gap = seconds_to_ms(gap_tolerance)
            min_ep = seconds_to_ms(min_episode_duration)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return cls(granularity, gap, min_ep, include_near)
