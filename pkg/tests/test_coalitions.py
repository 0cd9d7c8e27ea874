from __future__ import annotations

from cometlens.coalitions import block_profile, coalition_summary, detect_coalitions
from cometlens.corpus_io import load_corpus
from cometlens.episodes import Disalignment, Episode, Label, partition, segment
from cometlens.model import AnalysisConfig, Granularity, ObjectRef, TimeInterval


def test_example3_coalition(fixture_path):
    corpus, _ = load_corpus(fixture_path("example3.tsv"))
    (c,) = detect_coalitions(segment(corpus, AnalysisConfig()))
    assert c.coalition_block == ("C", "M") and c.focus_label == "PB1"
    assert [(b.actors, b.focus_label) for b in c.opposed] == [(("L",), "PB2")]
    assert c.disalignment is Disalignment.PROBLEM_SHIFT
    assert block_profile(c) == "VERBAL+GESTURAL"
    summary = coalition_summary([c], corpus)
    assert summary.count == 1 and summary.by_disalignment["PROBLEM_SHIFT"] == (1, c.duration_ms)
    assert summary.by_disalignment["WITHIN_GROUP"] == (0, 0)


def test_space_granularity_removes_coalition(fixture_path):
    corpus, _ = load_corpus(fixture_path("example3.tsv"))
    assert detect_coalitions(segment(corpus, AnalysisConfig(granularity=Granularity.SPACE))) == []


def test_no_coalition_among_singletons():
    foci = {a: {ObjectRef.parse(t)} for a, t in (("A", "SOL:a@PB1"), ("B", "SOL:b@PB2"), ("C", "TASK:t"))}
    blocks = partition(foci, Granularity.PROBLEM)
    ep = Episode(TimeInterval(0, 10), Label.NON_INT, blocks)
    assert detect_coalitions([ep]) == []


def test_two_pairs_give_two_coalitions():
    foci = {
        "A": {ObjectRef.parse("SOL:a@PB1")},
        "B": {ObjectRef.parse("SOL:b@PB1")},
        "C": {ObjectRef.parse("TASK:t")},
        "D": {ObjectRef.parse("TASK:t")},
    }
    ep = Episode(TimeInterval(0, 10), Label.NON_INT, partition(foci, Granularity.PROBLEM))
    found = detect_coalitions([ep])
    assert [c.coalition_block for c in found] == [("A", "B"), ("C", "D")]
    assert {c.disalignment for c in found} == {Disalignment.PROBLEM_VS_GROUP}
