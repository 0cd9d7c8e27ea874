"""Focus-gap coalitions: an aligned block of two or more actors working
concurrently with at least one other block focused elsewhere.

With more than three actors every largest block of size >= 2 in a
non-integrated episode is reported, each against all remaining blocks.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

from .episodes import Block, Disalignment, Episode, Label, classify_disalignment
from .model import Channel, Corpus, FocusClass, TimeInterval


@dataclass(frozen=True)
class CoalitionEpisode:
    interval: TimeInterval
    coalition_block: tuple[str, ...]
    coalition_focus: tuple[FocusClass, ...]
    opposed: tuple[Block, ...]
    disalignment: Disalignment
    modality_profile: dict[str, dict[Channel, int]]

    @property
    def focus_label(self) -> str:
        return "|".join(f.label for f in self.coalition_focus)

    @property
    def duration_ms(self) -> int:
        return self.interval.duration_ms


def _profile(episode: Episode) -> dict[str, dict[Channel, int]]:
    counts: dict[str, Counter] = defaultdict(Counter)
    for unit in episode.units:
        counts[unit.actor][unit.channel] += 1
    return {
        actor: {ch: counts[actor][ch] for ch in Channel if counts[actor][ch]}
        for actor in sorted(counts)
    }


def detect_coalitions(episodes: list[Episode]) -> list[CoalitionEpisode]:
    found = []
    for ep in episodes:
        if ep.label is not Label.NON_INT:
            continue
        largest = max(len(b.actors) for b in ep.blocks)
        if largest < 2:
            continue
        kind = classify_disalignment(ep)
        profile = _profile(ep)
        for block in ep.blocks:
            if len(block.actors) != largest:
                continue
            opposed = tuple(b for b in ep.blocks if b != block)
            found.append(CoalitionEpisode(ep.interval, block.actors, block.focus, opposed, kind, profile))
    found.sort(key=lambda c: (c.interval.start_ms, c.interval.end_ms, c.coalition_block))
    return found


def block_profile(coalition: CoalitionEpisode) -> str:
    """Channels used by the coalition's members, e.g. ``GESTURAL+VERBAL``."""
    used = {ch for actor in coalition.coalition_block for ch in coalition.modality_profile.get(actor, {})}
    return "+".join(ch.value for ch in Channel if ch in used) or "NONE"


@dataclass(frozen=True)
class CoalitionSummary:
    count: int
    total_ms: int
    by_disalignment: dict[str, tuple[int, int]]
    by_membership: dict[str, tuple[int, int]]
    by_profile: dict[str, tuple[int, int]]
    actors: tuple[str, ...]

    def as_dict(self) -> dict:
        def table(d):
            return {k: {"count": c, "total_ms": t} for k, (c, t) in d.items()}

        return {
            "count": self.count,
            "total_ms": self.total_ms,
            "by_disalignment": table(self.by_disalignment),
            "by_membership": table(self.by_membership),
            "by_profile": table(self.by_profile),
        }


def coalition_summary(coalitions: list[CoalitionEpisode], corpus: Corpus | None = None) -> CoalitionSummary:
    """Counts and exact total durations per disalignment type, membership and profile.

    Every disalignment type is always present (zero when unseen) so summaries
    from different corpora line up.
    """
    by_kind = {k.value: [0, 0] for k in Disalignment}
    by_members: dict[str, list[int]] = defaultdict(lambda: [0, 0])
    by_profile: dict[str, list[int]] = defaultdict(lambda: [0, 0])
    for c in coalitions:
        for table, key in (
            (by_kind, c.disalignment.value),
            (by_members, "+".join(c.coalition_block)),
            (by_profile, block_profile(c)),
        ):
            table[key][0] += 1
            table[key][1] += c.duration_ms

    def freeze(d):
        return {k: (v[0], v[1]) for k, v in sorted(d.items())}

    return CoalitionSummary(
        count=len(coalitions),
        total_ms=sum(c.duration_ms for c in coalitions),
        by_disalignment={k.value: tuple(by_kind[k.value]) for k in Disalignment},
        by_membership=freeze(by_members),
        by_profile=freeze(by_profile),
        actors=tuple(sorted(corpus.actors)) if corpus is not None else (),
    )
