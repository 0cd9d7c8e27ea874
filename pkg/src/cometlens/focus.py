"""Integration verdicts for parallel pairs.

Two concurrent activities are integrated when their objects fall in the same
category at the chosen granularity, whatever modalities carry them.  For
integrated pairs across semiotic channels (verbal / graphical / gestural)
the articulation is further labelled redundant or complementary.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import UnknownUnitError
from .intervals import ParallelPair
from .model import (
    AnalysisConfig,
    AnnotationUnit,
    Corpus,
    GestureKind,
    Granularity,
    VerbalKind,
    objects_match,
)


class Verdict(str, Enum):
    INTEGRATED = "INTEGRATED"
    NON_INTEGRATED = "NON_INTEGRATED"


class Scope(str, Enum):
    INDIVIDUAL = "INDIVIDUAL"
    COLLECTIVE = "COLLECTIVE"


class RelationKind(str, Enum):
    REDUNDANT = "REDUNDANT"
    COMPLEMENTARY = "COMPLEMENTARY"
    NOT_APPLICABLE = "NOT_APPLICABLE"


@dataclass(frozen=True)
class IntegrationVerdict:
    pair: ParallelPair
    level_results: dict[Granularity, bool]
    verdict: Verdict
    scope: Scope

    @property
    def integrated(self) -> bool:
        return self.verdict is Verdict.INTEGRATED


@dataclass(frozen=True)
class ModalityRelation:
    pair: ParallelPair
    kind: RelationKind


# elaboration, evaluation, clarification, manipulation; EXT tokens are uninterpreted
_FAMILY = {
    VerbalKind.GEN: "elaboration",
    VerbalKind.EVAL: "evaluation",
    VerbalKind.INFO: "clarification",
    VerbalKind.INTERP: "clarification",
    GestureKind.GRAPHTRAC: "elaboration",
    GestureKind.TEXTTRAC: "elaboration",
    GestureKind.DELIM2D: "elaboration",
    GestureKind.DELIM3D: "elaboration",
    GestureKind.POINT: "elaboration",
    GestureKind.MOVING: "manipulation",
    GestureKind.ROTATING: "manipulation",
    GestureKind.OVERLAYING: "manipulation",
}


def action_family(unit: AnnotationUnit) -> str:
    if unit.v_action is not None:
        return _FAMILY[unit.v_action.kind]
    if unit.g_action.kind is GestureKind.EXT:
        return f"ext:{unit.g_action.ext_token}"
    return _FAMILY[unit.g_action.kind]


def _resolve(pair: ParallelPair, corpus: Corpus) -> tuple[AnnotationUnit, AnnotationUnit]:
    for uid in (pair.unit_a, pair.unit_b):
        if uid not in corpus:
            raise UnknownUnitError(f"unit {uid!r} is not in the corpus")
    return corpus.unit(pair.unit_a), corpus.unit(pair.unit_b)


def classify_integration(pair: ParallelPair, corpus: Corpus, config: AnalysisConfig) -> IntegrationVerdict:
    a, b = _resolve(pair, corpus)
    levels = {level: objects_match(a.object, b.object, level) for level in Granularity}
    verdict = Verdict.INTEGRATED if levels[config.granularity] else Verdict.NON_INTEGRATED
    scope = Scope.INDIVIDUAL if a.actor == b.actor else Scope.COLLECTIVE
    return IntegrationVerdict(pair, levels, verdict, scope)


def classify_modality_relation(pair: ParallelPair, corpus: Corpus, config: AnalysisConfig) -> ModalityRelation:
    """Redundant: same channel-crossing content (instance-equal objects, same action family).

    Complementary: integrated at the configured level but refined below it,
    or carried by a different family of action.  Same-channel and
    non-integrated pairs are not applicable.
    """
    a, b = _resolve(pair, corpus)
    if not objects_match(a.object, b.object, config.granularity) or a.channel is b.channel:
        return ModalityRelation(pair, RelationKind.NOT_APPLICABLE)
    if objects_match(a.object, b.object, Granularity.INSTANCE) and action_family(a) == action_family(b):
        return ModalityRelation(pair, RelationKind.REDUNDANT)
    return ModalityRelation(pair, RelationKind.COMPLEMENTARY)


@dataclass(frozen=True)
class ClassifiedPair:
    pair: ParallelPair
    verdict: IntegrationVerdict
    relation: ModalityRelation


def classify_pairs(pairs: list[ParallelPair], corpus: Corpus, config: AnalysisConfig) -> list[ClassifiedPair]:
    return [
        ClassifiedPair(p, classify_integration(p, corpus, config), classify_modality_relation(p, corpus, config))
        for p in pairs
    ]
