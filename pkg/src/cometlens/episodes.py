"""Episode segmentation.

Every timeline slice gets a partition of its active actors into blocks of
mutually aligned actors: an actor's focus is the set of objects of all their
active units, and two actors share a block when their foci fall in the same
object class at the configured granularity.  An actor whose own units point
at different classes is isolated in a singleton block flagged
``intra_split``.  Consecutive slices with the same label and partition form
one episode.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable

from .errors import EmptyCorpusError, NotDisalignedError
from .intervals import build_timeline
from .model import (
    AnalysisConfig,
    Channel,
    Corpus,
    FocusClass,
    Granularity,
    ObjectRef,
    Space,
    TimeInterval,
    format_ms,
)

log = logging.getLogger(__name__)


class Label(str, Enum):
    INT = "INT"
    NON_INT = "NON_INT"
    SOLO = "SOLO"
    IDLE = "IDLE"


class Disalignment(str, Enum):
    PROBLEM_SHIFT = "PROBLEM_SHIFT"
    PROBLEM_VS_GROUP = "PROBLEM_VS_GROUP"
    PROBLEM_VS_DOMAIN = "PROBLEM_VS_DOMAIN"
    GROUP_VS_DOMAIN = "GROUP_VS_DOMAIN"
    WITHIN_GROUP = "WITHIN_GROUP"
    WITHIN_DOMAIN = "WITHIN_DOMAIN"
    MIXED = "MIXED"


@dataclass(frozen=True)
class ActorFocus:
    actor: str
    focus_objects: frozenset[ObjectRef]
    intra_actor_aligned: bool


@dataclass(frozen=True, order=True)
class Block:
    actors: tuple[str, ...]
    focus: tuple[FocusClass, ...]
    intra_split: bool = False

    @property
    def focus_label(self) -> str:
        return "|".join(f.label for f in self.focus)

    @property
    def space(self) -> Space | None:
        """The block's representation space, ``None`` when its focus straddles spaces."""
        spaces = {f.space for f in self.focus}
        return spaces.pop() if len(spaces) == 1 else None


@dataclass(frozen=True)
class ActiveUnit:
    unit_id: str
    actor: str
    channel: Channel


@dataclass(frozen=True)
class Episode:
    interval: TimeInterval
    label: Label
    blocks: tuple[Block, ...]
    units: tuple[ActiveUnit, ...] = ()

    @property
    def duration_ms(self) -> int:
        return self.interval.duration_ms

    @property
    def actors(self) -> tuple[str, ...]:
        return tuple(sorted(a for b in self.blocks for a in b.actors))

    @property
    def signature(self) -> tuple:
        return (self.label, self.blocks)

    def absorb(self, other: "Episode") -> "Episode":
        """This episode stretched over ``other`` (adjacent), keeping this label."""
        lo = min(self.interval.start_ms, other.interval.start_ms)
        hi = max(self.interval.end_ms, other.interval.end_ms)
        units = tuple(sorted(set(self.units) | set(other.units), key=lambda u: u.unit_id))
        return replace(self, interval=TimeInterval(lo, hi), units=units)


def actor_focus(actor: str, objects: Iterable[ObjectRef], level: Granularity) -> ActorFocus:
    objects = frozenset(objects)
    classes = {FocusClass.of(o, level) for o in objects}
    return ActorFocus(actor, objects, len(classes) <= 1)


def partition(foci: dict[str, set[ObjectRef]], level: Granularity) -> tuple[Block, ...]:
    """Group actors with a single shared focus class; split actors stay alone."""
    groups: dict[FocusClass, list[str]] = defaultdict(list)
    blocks: list[Block] = []
    for actor, objects in foci.items():
        classes = sorted({FocusClass.of(o, level) for o in objects})
        if len(classes) == 1:
            groups[classes[0]].append(actor)
        else:
            blocks.append(Block((actor,), tuple(classes), intra_split=True))
    for focus, actors in groups.items():
        blocks.append(Block(tuple(sorted(actors)), (focus,)))
    return tuple(sorted(blocks))


def label_for(blocks: tuple[Block, ...]) -> Label:
    n_actors = sum(len(b.actors) for b in blocks)
    if n_actors == 0:
        return Label.IDLE
    if n_actors == 1:
        return Label.SOLO
    return Label.INT if len(blocks) == 1 else Label.NON_INT


def slice_partitions(corpus: Corpus, level: Granularity) -> list[tuple[TimeInterval, tuple[Block, ...]]]:
    timeline = build_timeline(corpus)
    out = []
    for sl in timeline.slices:
        foci: dict[str, set[ObjectRef]] = defaultdict(set)
        for uid in sl.active:
            unit = corpus.unit(uid)
            foci[unit.actor].add(unit.object)
        out.append((sl.interval, partition(foci, level)))
    return out


def merge_short(episodes: list[Episode], min_ms: int, warnings: list[str] | None = None) -> list[Episode]:
    """Fold episodes shorter than ``min_ms`` into their predecessor.

    A short run at the very start has no predecessor and folds forward.
    """
    def note(ep: Episode, where: str):
        msg = (
            f"W_SHORT_EPISODE: {ep.label.value} episode at {format_ms(ep.interval.start_ms)}"
            f" ({format_ms(ep.duration_ms)} s) merged into the {where} episode"
        )
        log.info(msg)
        if warnings is not None:
            warnings.append(msg)

    out: list[Episode] = []
    pending: Episode | None = None
    for ep in episodes:
        if ep.duration_ms < min_ms:
            if out:
                note(ep, "preceding")
                out[-1] = out[-1].absorb(ep)
            else:
                note(ep, "following")
                pending = ep if pending is None else pending.absorb(ep)
            continue
        if pending is not None:
            ep = ep.absorb(pending)
            pending = None
        if out and out[-1].signature == ep.signature:
            out[-1] = out[-1].absorb(ep)
        else:
            out.append(ep)
    if pending is not None:
        out.append(pending)
    return out


def segment(corpus: Corpus, config: AnalysisConfig, warnings: list[str] | None = None) -> list[Episode]:
    if not corpus.units:
        raise EmptyCorpusError("cannot segment an empty corpus")
    level = config.granularity
    timeline = build_timeline(corpus)
    episodes: list[Episode] = []
    for sl in timeline.slices:
        foci: dict[str, set[ObjectRef]] = defaultdict(set)
        active = []
        for uid in sl.active:
            unit = corpus.unit(uid)
            foci[unit.actor].add(unit.object)
            active.append(ActiveUnit(uid, unit.actor, unit.channel))
        blocks = partition(foci, level)
        ep = Episode(sl.interval, label_for(blocks), blocks, tuple(active))
        if episodes and episodes[-1].signature == ep.signature:
            episodes[-1] = episodes[-1].absorb(ep)
        else:
            episodes.append(ep)
    if config.min_episode_ms > 0:
        episodes = merge_short(episodes, config.min_episode_ms, warnings)
    return episodes


def _problem_of(block: Block):
    problems = {f.problem for f in block.focus}
    if len(problems) != 1 or None in problems:
        # unindexed data and split foci fall back to their own class
        return ("class", block.focus)
    return problems.pop()


def classify_disalignment(episode: Episode) -> Disalignment:
    if episode.label is not Label.NON_INT:
        raise NotDisalignedError(f"episode is {episode.label.value}, not NON_INT")
    spaces = [b.space for b in episode.blocks]
    if None in spaces:
        return Disalignment.MIXED
    distinct = set(spaces)
    if distinct == {Space.PROBLEM_SOLUTION}:
        problems = {_problem_of(b) for b in episode.blocks}
        return Disalignment.PROBLEM_SHIFT if len(problems) > 1 else Disalignment.MIXED
    if distinct == {Space.GROUP}:
        return Disalignment.WITHIN_GROUP
    if distinct == {Space.DOMAIN}:
        return Disalignment.WITHIN_DOMAIN
    if distinct == {Space.PROBLEM_SOLUTION, Space.GROUP}:
        return Disalignment.PROBLEM_VS_GROUP
    if distinct == {Space.PROBLEM_SOLUTION, Space.DOMAIN}:
        return Disalignment.PROBLEM_VS_DOMAIN
    if distinct == {Space.GROUP, Space.DOMAIN}:
        return Disalignment.GROUP_VS_DOMAIN
    return Disalignment.MIXED
