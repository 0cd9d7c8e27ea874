"""End-to-end analysis run and its deterministic serialisation.

A :class:`RunReport` holds plain, ordered data: dictionaries keep insertion
order, times are :class:`Seconds` and render with exactly three decimals.
Nothing environment-dependent (clock, paths, hostnames) enters a report, so
the same input and configuration always give the same bytes.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .coalitions import CoalitionEpisode, block_profile, coalition_summary, detect_coalitions
from .corpus_io import ParseReport
from .episodes import Episode, Label, segment
from .errors import InvariantError, NoVerbalError
from .focus import ClassifiedPair, classify_pairs
from .intervals import Relation, find_parallel_pairs
from .model import AnalysisConfig, Corpus, Seconds, TimeInterval, format_ms
from .patterns import PRESETS, PatternMatch, match_pattern
from . import stats as st

MERGE_CONVENTION = "short episodes fold into the preceding episode; a leading short run folds forward"
TRANSITION_ORDER = "verbal units ordered by (t_start, unit_id)"


def _iv(interval: TimeInterval) -> dict:
    return {"start": Seconds(interval.start_ms), "end": Seconds(interval.end_ms)}


def dumps(value) -> str:
    """JSON text with fixed key order, 2-space indent and a trailing newline."""
    return _dump(value, 0) + "\n"


def _dump(value, depth: int) -> str:
    pad = "  " * (depth + 1)
    end = "  " * depth
    if isinstance(value, Seconds):
        return format_ms(int(value))
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_dump(v, depth + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        return "[\n" + ",\n".join(pad + _dump(v, depth + 1) for v in value) + "\n" + end + "]"
    if isinstance(value, float):
        return f"{value:.3f}"
    return json.dumps(value, ensure_ascii=False)


def config_echo(config: AnalysisConfig, pattern: str, scope: st.TransitionScope) -> dict:
    return {
        "granularity": config.granularity.value,
        "gap_tolerance": Seconds(config.gap_tolerance_ms),
        "min_episode_duration": Seconds(config.min_episode_ms),
        "include_near": config.include_near,
        "time_resolution": Seconds(config.time_resolution_ms),
        "pattern": pattern,
        "pattern_expression": PRESETS.get(pattern, pattern),
        "transition_scope": scope.value,
        "short_episode_merge": MERGE_CONVENTION,
        "transition_order": TRANSITION_ORDER,
    }


@dataclass
class Analysis:
    """Every intermediate result of one run, before serialisation."""

    corpus: Corpus
    config: AnalysisConfig
    pairs: list[ClassifiedPair]
    episodes: list[Episode]
    matches: list[PatternMatch]
    coalitions: list[CoalitionEpisode]
    cooccurrence: st.CoOccurrenceMatrix
    transitions: st.TransitionMatrix | None
    durations: st.DurationReport
    warnings: list[str] = field(default_factory=list)


def analyse(
    corpus: Corpus,
    config: AnalysisConfig,
    pattern: str = "composite",
    scope: st.TransitionScope | str = st.TransitionScope.POOLED,
) -> Analysis:
    warnings: list[str] = []
    pairs = classify_pairs(find_parallel_pairs(corpus, config), corpus, config)
    episodes = segment(corpus, config, warnings)
    matches = match_pattern(episodes, pattern)
    coalitions = detect_coalitions(episodes)
    try:
        trans = st.transitions(corpus, scope)
    except NoVerbalError as exc:
        trans = None
        warnings.append(f"W_NO_VERBAL: {exc.args[0]}; transition matrix omitted")
    result = Analysis(
        corpus, config, pairs, episodes, matches, coalitions,
        st.co_occurrence(pairs, corpus), trans, st.durations(episodes, coalitions), warnings,
    )
    check_invariants(result)
    return result


def check_invariants(a: Analysis) -> None:
    """Cross-stage consistency; a failure here is a bug, not bad input."""
    span = a.corpus.span
    eps = a.episodes
    if eps[0].interval.start_ms != span.start_ms or eps[-1].interval.end_ms != span.end_ms:
        raise InvariantError("episodes do not cover the corpus span")
    for prev, nxt in zip(eps, eps[1:]):
        if prev.interval.end_ms != nxt.interval.start_ms:
            raise InvariantError(f"episodes are not contiguous at {format_ms(prev.interval.end_ms)}")
    if sum(e.duration_ms for e in eps) != span.duration_ms:
        raise InvariantError("episode durations do not sum to the span")
    if a.cooccurrence.total != len(a.pairs):
        raise InvariantError("co-occurrence total differs from the number of pairs")
    non_int = {e.interval for e in eps if e.label is Label.NON_INT}
    if any(c.interval not in non_int for c in a.coalitions):
        raise InvariantError("coalition outside a NON_INT episode")


def pair_dict(cp: ClassifiedPair) -> dict:
    p = cp.pair
    return {
        "unit_a": p.unit_a,
        "unit_b": p.unit_b,
        "relation": p.relation.value,
        "shared": _iv(p.shared),
        "verdict": cp.verdict.verdict.value,
        "scope": cp.verdict.scope.value,
        "levels": {g.value: ok for g, ok in cp.verdict.level_results.items()},
        "modality_relation": cp.relation.kind.value,
    }


def episode_dict(ep: Episode) -> dict:
    return {
        **_iv(ep.interval),
        "duration": Seconds(ep.duration_ms),
        "label": ep.label.value,
        "blocks": [
            {"actors": list(b.actors), "focus": b.focus_label, "intra_split": b.intra_split}
            for b in ep.blocks
        ],
    }


def coalition_dict(c: CoalitionEpisode) -> dict:
    return {
        **_iv(c.interval),
        "duration": Seconds(c.duration_ms),
        "block": list(c.coalition_block),
        "focus": c.focus_label,
        "opposed": [{"actors": list(b.actors), "focus": b.focus_label} for b in c.opposed],
        "disalignment": c.disalignment.value,
        "profile": block_profile(c),
        "modality_profile": {
            actor: {ch.value: n for ch, n in chans.items()} for actor, chans in c.modality_profile.items()
        },
    }


def _alignment_summary(a: Analysis) -> dict:
    counted = [cp for cp in a.pairs if a.config.include_near or cp.pair.relation is not Relation.NEAR]
    by_verdict = Counter(cp.verdict.verdict.value for cp in counted)
    by_scope = Counter(f"{cp.verdict.verdict.value}/{cp.verdict.scope.value}" for cp in counted)
    by_relation = Counter(cp.pair.relation.value for cp in counted)
    by_modality = Counter(cp.relation.kind.value for cp in counted)
    return {
        "pairs_counted": len(counted),
        "near_included": a.config.include_near,
        "by_relation": dict(sorted(by_relation.items())),
        "by_verdict": dict(sorted(by_verdict.items())),
        "by_verdict_scope": dict(sorted(by_scope.items())),
        "by_modality_relation": dict(sorted(by_modality.items())),
    }


def _durations_dict(report: st.DurationReport) -> dict:
    def render(table):
        return {
            key: {
                "count": ld.count,
                "total": Seconds(ld.total_ms),
                "mean": Seconds(ld.mean_ms),
                "histogram": {format_ms(b): n for b, n in sorted(ld.histogram.items())},
            }
            for key, ld in table.items()
        }

    return {
        "bin": Seconds(st.HIST_BIN_MS),
        "total": Seconds(report.total_ms),
        "by_label": render(report.by_label),
        "coalitions_by_type": render(report.coalitions_by_type),
    }


def coalition_summary_dict(a: Analysis) -> dict:
    s = coalition_summary(a.coalitions, a.corpus)

    def table(d):
        return {k: {"count": c, "total": Seconds(t)} for k, (c, t) in d.items()}

    return {
        "count": s.count,
        "total": Seconds(s.total_ms),
        "by_disalignment": table(s.by_disalignment),
        "by_membership": table(s.by_membership),
        "by_profile": table(s.by_profile),
    }


def stats_dict(a: Analysis) -> dict:
    trans = a.transitions
    return {
        "units": st.unit_counts(a.corpus),
        "cooccurrence": {
            "total": a.cooccurrence.total,
            "cells": [
                {k: (Seconds(v) if k == "overlap_ms" else v) for k, v in row.items()}
                for row in a.cooccurrence.rows()
                if row["count"]
            ],
        },
        "transitions": None if trans is None else {
            "scope": trans.scope.value,
            "total": trans.total,
            "rows": trans.rows(),
        },
        "durations": _durations_dict(a.durations),
    }


def build_report(a: Analysis, parse_report: ParseReport | None = None, pattern: str = "composite") -> dict:
    scope = a.transitions.scope if a.transitions is not None else st.TransitionScope.POOLED
    span = a.corpus.span
    return {
        "tool_version": __version__,
        "config": config_echo(a.config, pattern, scope),
        "parse": (parse_report.as_dict() if parse_report is not None else None),
        "corpus": {
            "units": len(a.corpus.units),
            "actors": sorted(a.corpus.actors),
            "span": _iv(span),
            "meta": dict(sorted(a.corpus.meta.items())),
        },
        "pairs": [pair_dict(cp) for cp in a.pairs],
        "alignment": _alignment_summary(a),
        "episodes": [episode_dict(e) for e in a.episodes],
        "pattern_matches": [
            {**_iv(m.interval), "first": m.start, "stop": m.stop, "labels": [lab.value for lab in m.labels]}
            for m in a.matches
        ],
        "coalitions": [coalition_dict(c) for c in a.coalitions],
        "summary": {
            "pairs": len(a.pairs),
            "episodes": len(a.episodes),
            "pattern_matches": len(a.matches),
            "coalitions": coalition_summary_dict(a),
        },
        "stats": stats_dict(a),
        "warnings": list(a.warnings),
    }


def episodes_csv(episodes: list[Episode]) -> str:
    rows = [
        {
            "start": format_ms(e.interval.start_ms),
            "end": format_ms(e.interval.end_ms),
            "label": e.label.value,
            "blocks": " ; ".join(f"{'+'.join(b.actors)}:{b.focus_label}" for b in e.blocks),
        }
        for e in episodes
    ]
    return st.to_csv(rows, ["start", "end", "label", "blocks"])


def pairs_csv(pairs: list[ClassifiedPair]) -> str:
    rows = [
        {
            "unit_a": cp.pair.unit_a,
            "unit_b": cp.pair.unit_b,
            "relation": cp.pair.relation.value,
            "shared_start": format_ms(cp.pair.shared.start_ms),
            "shared_end": format_ms(cp.pair.shared.end_ms),
            "verdict": cp.verdict.verdict.value,
            "scope": cp.verdict.scope.value,
            "modality_relation": cp.relation.kind.value,
        }
        for cp in pairs
    ]
    return st.to_csv(rows, list(rows[0]) if rows else [
        "unit_a", "unit_b", "relation", "shared_start", "shared_end", "verdict", "scope", "modality_relation",
    ])


def coalitions_csv(coalitions: list[CoalitionEpisode]) -> str:
    rows = [
        {
            "start": format_ms(c.interval.start_ms),
            "end": format_ms(c.interval.end_ms),
            "block": "+".join(c.coalition_block),
            "focus": c.focus_label,
            "opposed": " ; ".join(f"{'+'.join(b.actors)}:{b.focus_label}" for b in c.opposed),
            "disalignment": c.disalignment.value,
            "profile": block_profile(c),
        }
        for c in coalitions
    ]
    return st.to_csv(rows, ["start", "end", "block", "focus", "opposed", "disalignment", "profile"])


def write_csv_bundle(a: Analysis, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "pairs.csv": pairs_csv(a.pairs),
        "episodes.csv": episodes_csv(a.episodes),
        "coalitions.csv": coalitions_csv(a.coalitions),
        "cooccurrence.csv": st.co_occurrence_csv(a.cooccurrence),
        "durations.csv": st.durations_csv(a.durations),
        "histogram.csv": st.histogram_csv(a.durations),
    }
    if a.transitions is not None:
        files["transitions.csv"] = st.transitions_csv(a.transitions)
    written = []
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8", newline="")
        written.append(path)
    return written
