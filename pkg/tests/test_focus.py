from __future__ import annotations

import pytest
from hypothesis import given, settings

from cometlens.corpus_io import load_corpus
from cometlens.errors import UnknownUnitError
from cometlens.focus import (
    RelationKind,
    Scope,
    Verdict,
    action_family,
    classify_integration,
    classify_modality_relation,
    classify_pairs,
)
from cometlens.intervals import ParallelPair, Relation, find_parallel_pairs
from cometlens.model import AnalysisConfig, Granularity, TimeInterval

from corpusgen import corpora


def by_ids(classified):
    return {(c.pair.unit_a, c.pair.unit_b): c for c in classified}


def load(fixture_path, name):
    return load_corpus(fixture_path(name))[0]


def test_example1_redundant_individual(fixture_path):
    corpus = load(fixture_path, "example1.tsv")
    cfg = AnalysisConfig()
    (cp,) = classify_pairs(find_parallel_pairs(corpus, cfg), corpus, cfg)
    assert cp.verdict.verdict is Verdict.INTEGRATED and cp.verdict.scope is Scope.INDIVIDUAL
    assert cp.relation.kind is RelationKind.REDUNDANT


def test_example2_judgements(fixture_path):
    corpus = load(fixture_path, "example2.tsv")
    cfg = AnalysisConfig()
    pairs = by_ids(classify_pairs(find_parallel_pairs(corpus, cfg), corpus, cfg))
    assert pairs[("1", "2")].relation.kind is RelationKind.REDUNDANT
    assert pairs[("1", "3")].relation.kind is RelationKind.COMPLEMENTARY
    assert pairs[("1", "3")].verdict.scope is Scope.COLLECTIVE
    assert all(c.verdict.verdict is Verdict.INTEGRATED for c in pairs.values())


def test_example3_problem_shift(fixture_path):
    corpus = load(fixture_path, "example3.tsv")
    cfg = AnalysisConfig()
    pairs = by_ids(classify_pairs(find_parallel_pairs(corpus, cfg), corpus, cfg))
    mixed = pairs[("13", "14v")]
    assert mixed.verdict.verdict is Verdict.NON_INTEGRATED
    assert mixed.verdict.level_results == {
        Granularity.INSTANCE: False, Granularity.PROBLEM: False, Granularity.SPACE: True,
    }
    assert mixed.relation.kind is RelationKind.NOT_APPLICABLE
    at_space = classify_integration(mixed.pair, corpus, AnalysisConfig(granularity=Granularity.SPACE))
    assert at_space.verdict is Verdict.INTEGRATED


def test_same_channel_not_applicable(fixture_path):
    corpus = load(fixture_path, "example3.tsv")
    cfg = AnalysisConfig()
    pairs = by_ids(classify_pairs(find_parallel_pairs(corpus, cfg), corpus, cfg))
    # two verbal turns on the same solution
    assert pairs[("1", "2")].relation.kind is RelationKind.NOT_APPLICABLE


def test_reflexive_pair_integrated(fixture_path):
    corpus = load(fixture_path, "example2.tsv")
    pair = ParallelPair("1", "1", Relation.SIMULTANEOUS, TimeInterval(0, 1))
    for level in Granularity:
        assert classify_integration(pair, corpus, AnalysisConfig(granularity=level)).integrated


def test_unknown_unit(fixture_path):
    corpus = load(fixture_path, "example2.tsv")
    pair = ParallelPair("1", "nope", Relation.OVERLAP, TimeInterval(0, 1))
    with pytest.raises(UnknownUnitError) as info:
        classify_integration(pair, corpus, AnalysisConfig())
    assert info.value.code == "E_UNKNOWN_UNIT"
    with pytest.raises(UnknownUnitError):
        classify_modality_relation(pair, corpus, AnalysisConfig())


def test_ext_family_is_its_own(fixture_path):
    corpus = load(fixture_path, "example3.tsv")
    assert action_family(corpus.unit("4")) == "ext:Movem_2d"
    assert action_family(corpus.unit("7")) == action_family(corpus.unit("6")) == "elaboration"


@settings(max_examples=60, deadline=None)
@given(corpora(max_units=25, horizon_ms=8000))
def test_verdict_properties(corpus):
    for level in Granularity:
        cfg = AnalysisConfig(granularity=level)
        classified = classify_pairs(find_parallel_pairs(corpus, cfg), corpus, cfg)
        for c in classified:
            lr = c.verdict.level_results
            assert c.verdict.integrated == lr[level]
            if not lr[Granularity.SPACE]:
                assert not lr[Granularity.PROBLEM] and not lr[Granularity.INSTANCE]
            if not lr[Granularity.PROBLEM]:
                assert not lr[Granularity.INSTANCE]
            if c.relation.kind is not RelationKind.NOT_APPLICABLE:
                a, b = corpus.unit(c.pair.unit_a), corpus.unit(c.pair.unit_b)
                assert c.verdict.integrated and a.channel is not b.channel
            swapped = ParallelPair(c.pair.unit_b, c.pair.unit_a, c.pair.relation, c.pair.shared)
            assert classify_integration(swapped, corpus, cfg).verdict is c.verdict.verdict
            assert classify_modality_relation(swapped, corpus, cfg).kind is c.relation.kind
