"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line (also collected into
the terminal summary) before asserting.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager

from cometlens import cli
from cometlens.coalitions import detect_coalitions
from cometlens.corpus_io import Format, load_corpus, parse_corpus, write_corpus
from cometlens.episodes import Disalignment, Label, segment, slice_partitions
from cometlens.focus import RelationKind, Scope, Verdict, classify_pairs
from cometlens.intervals import find_parallel_pairs
from cometlens.model import AnalysisConfig, Granularity, ObjectRef, TimeInterval, objects_match
from cometlens.patterns import match_pattern
from cometlens.synth import generate, planted_coalition_spec

import conftest
from corpusgen import OBJECTS, random_corpus
from oracles import brute_force_pairs


@contextmanager
def criterion(number: int, title: str):
    """Record the outcome line for one criterion; ``checks`` collects named booleans."""
    checks: dict[str, bool] = {}
    start = time.perf_counter()
    try:
        yield checks
    except Exception as exc:  # a crash counts as a failure and is re-raised
        checks[f"raised {type(exc).__name__}"] = False
        raise
    finally:
        elapsed = time.perf_counter() - start
        ok = bool(checks) and all(checks.values())
        failed = [name for name, v in checks.items() if not v]
        detail = f"{elapsed:.2f}s" + (f"; failed: {', '.join(failed)}" if failed else "")
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
        print(line)
        conftest.ACCEPTANCE_LINES.append(line)


def analysed(path, cfg=None):
    cfg = cfg or AnalysisConfig()
    corpus, _ = load_corpus(path)
    pairs = classify_pairs(find_parallel_pairs(corpus, cfg), corpus, cfg)
    episodes = segment(corpus, cfg)
    return corpus, pairs, episodes


def test_criterion_1_single_designer_redundant_pair(fixture_path):
    with criterion(1, "Example 1 cross-modality pair is INTEGRATED/INDIVIDUAL/REDUNDANT") as checks:
        t0 = time.perf_counter()
        corpus, pairs, _ = analysed(fixture_path("example1.tsv"))
        cross = [
            p for p in pairs
            if corpus.unit(p.pair.unit_a).modality is not corpus.unit(p.pair.unit_b).modality
        ]
        checks["one cross-modality pair"] = len(cross) == 1
        p = cross[0]
        checks["actor L"] = {corpus.unit(p.pair.unit_a).actor, corpus.unit(p.pair.unit_b).actor} == {"L"}
        checks["INTEGRATED"] = p.verdict.verdict is Verdict.INTEGRATED
        checks["INDIVIDUAL"] = p.verdict.scope is Scope.INDIVIDUAL
        checks["REDUNDANT"] = p.relation.kind is RelationKind.REDUNDANT
        checks["runtime < 1 s"] = time.perf_counter() - t0 < 1.0
    assert all(checks.values()), checks


def test_criterion_2_two_designers_integrated(fixture_path):
    with criterion(2, "Example 2 INT episode {L, C}; lines 1-2 REDUNDANT; lines 1-3 COMPLEMENTARY") as checks:
        t0 = time.perf_counter()
        _, pairs, episodes = analysed(fixture_path("example2.tsv"))
        ints = [e for e in episodes if e.label is Label.INT]
        checks["one INT episode"] = len(ints) == 1
        checks["block {L, C}"] = len(ints) == 1 and [b.actors for b in ints[0].blocks] == [("C", "L")]
        by_ids = {(p.pair.unit_a, p.pair.unit_b): p for p in pairs}
        checks["1-2 REDUNDANT"] = by_ids[("1", "2")].relation.kind is RelationKind.REDUNDANT
        checks["1-3 COMPLEMENTARY"] = by_ids[("1", "3")].relation.kind is RelationKind.COMPLEMENTARY
        checks["runtime < 1 s"] = time.perf_counter() - t0 < 1.0
    assert all(checks.values()), checks


def test_criterion_3_coalition(fixture_path):
    with criterion(3, "Example 3 INT NON_INT INT match; one {C,M} vs {L} PROBLEM_SHIFT coalition; none at SPACE") as checks:
        t0 = time.perf_counter()
        corpus, _, episodes = analysed(fixture_path("example3.tsv"))
        checks["span 12:07:51-12:08:38"] = corpus.span == TimeInterval(43_671_000, 43_718_000)
        checks["composite match"] = len(match_pattern(episodes, "INT NON_INT INT")) >= 1
        coalitions = detect_coalitions(episodes)
        checks["exactly one coalition"] = len(coalitions) == 1
        if coalitions:
            c = coalitions[0]
            checks["block {M, C} on PB1"] = c.coalition_block == ("C", "M") and c.focus_label == "PB1"
            checks["opposed {L} on PB2"] = [(b.actors, b.focus_label) for b in c.opposed] == [(("L",), "PB2")]
            checks["PROBLEM_SHIFT"] = c.disalignment is Disalignment.PROBLEM_SHIFT
        space = segment(corpus, AnalysisConfig(granularity=Granularity.SPACE))
        checks["none at SPACE"] = detect_coalitions(space) == []
        checks["runtime < 1 s"] = time.perf_counter() - t0 < 1.0
    assert all(checks.values()), checks


def test_criterion_4_sweep_equals_brute_force():
    with criterion(4, "sweep-line pairs equal brute-force pairs on 100 random corpora (<= 200 units)") as checks:
        t0 = time.perf_counter()
        mismatches = 0
        sizes = []
        for seed in range(100):
            corpus = random_corpus(1000 + seed, n_units=random.Random(seed).randint(1, 200))
            sizes.append(len(corpus))
            tol = (0, 500, 1000, 2500)[seed % 4]
            got = {
                (p.unit_a, p.unit_b, p.relation.value, (p.shared.start_ms, p.shared.end_ms))
                for p in find_parallel_pairs(corpus, AnalysisConfig(gap_tolerance_ms=tol))
            }
            mismatches += got != brute_force_pairs(corpus, tol)
        checks["exact set equality"] = mismatches == 0
        checks["sizes up to 200"] = max(sizes) <= 200 and max(sizes) >= 150
        checks["runtime < 10 s"] = time.perf_counter() - t0 < 10.0
    assert all(checks.values()), checks


def _iou(a: TimeInterval, b: TimeInterval) -> float:
    inter = max(0, min(a.end_ms, b.end_ms) - max(a.start_ms, b.start_ms))
    union = max(a.end_ms, b.end_ms) - min(a.start_ms, b.start_ms)
    return inter / union if union else float(a == b)


def test_criterion_5_synthetic_recovery():
    with criterion(5, "synthetic recovery: exact at zero jitter; IoU >= 0.9 in >= 95% of 200 jittered trials") as checks:
        t0 = time.perf_counter()
        cfg = AnalysisConfig()
        exact = 0
        for seed in range(50):
            corpus, truth = generate(planted_coalition_spec(seed, jitter_ms=0, n_actors=3 + seed % 2))
            eps = segment(corpus, cfg)
            same_eps = len(eps) == len(truth.episodes) and all(
                e.label is t.label
                and [b.actors for b in e.blocks] == [b.actors for b in t.blocks]
                and abs(e.interval.start_ms - t.interval.start_ms) <= 1
                and abs(e.interval.end_ms - t.interval.end_ms) <= 1
                for e, t in zip(eps, truth.episodes)
            )
            found = detect_coalitions(eps)
            same_coal = len(found) == len(truth.coalitions) and all(
                f.coalition_block == t.block
                and abs(f.interval.start_ms - t.interval.start_ms) <= 1
                and abs(f.interval.end_ms - t.interval.end_ms) <= 1
                for f, t in zip(found, truth.coalitions)
            )
            exact += same_eps and same_coal
        checks["zero-jitter exact (50/50)"] = exact == 50

        recovered = 0
        trials = 200
        for seed in range(trials):
            spec = planted_coalition_spec(10_000 + seed, jitter_ms=cfg.gap_tolerance_ms, n_actors=3 + seed % 2)
            corpus, truth = generate(spec)
            found = detect_coalitions(segment(corpus, cfg))
            ok = all(
                max((_iou(p.interval, f.interval) for f in found if f.coalition_block == p.block), default=0.0) >= 0.9
                for p in truth.coalitions
            )
            recovered += ok
        rate = recovered / trials
        print(f"jittered recovery rate: {recovered}/{trials} = {rate:.3f}")
        checks[f"jittered recovery >= 95% ({recovered}/{trials})"] = rate >= 0.95
        checks["runtime < 30 s"] = time.perf_counter() - t0 < 30.0
    assert all(checks.values()), checks


def test_criterion_6_invariant_suite():
    with criterion(6, "tiling, refinement monotonicity, objects_match equivalence, 500 TSV round-trips") as checks:
        tiling = refinement = True
        for seed in range(100):
            corpus = random_corpus(2000 + seed, n_units=60)
            for cfg in (AnalysisConfig(), AnalysisConfig(min_episode_ms=1500)):
                eps = segment(corpus, cfg)
                tiling &= sum(e.duration_ms for e in eps) == corpus.span.duration_ms
                tiling &= all(a.interval.end_ms == b.interval.start_ms for a, b in zip(eps, eps[1:]))
            levels = [slice_partitions(corpus, g) for g in (Granularity.INSTANCE, Granularity.PROBLEM, Granularity.SPACE)]
            for finer, coarser in zip(levels, levels[1:]):
                for (_, pf), (_, pc) in zip(finer, coarser):
                    refinement &= all(any(set(b.actors) <= set(c.actors) for c in pc) for b in pf)
        checks["tiling exact"] = tiling
        checks["refinement monotone"] = refinement

        rng = random.Random(6)
        objs = [ObjectRef.parse(t) for t in OBJECTS]
        violations = 0
        for _ in range(10_000):
            a, b, c = rng.choice(objs), rng.choice(objs), rng.choice(objs)
            for g in Granularity:
                violations += not objects_match(a, a, g)
                violations += objects_match(a, b, g) != objects_match(b, a, g)
                violations += objects_match(a, b, g) and objects_match(b, c, g) and not objects_match(a, c, g)
        checks["equivalence on 10^4 triples"] = violations == 0

        roundtrip_failures = 0
        for seed in range(500):
            corpus = random_corpus(5000 + seed)
            again, report = parse_corpus(write_corpus(corpus, Format.TSV), Format.TSV)
            roundtrip_failures += not (report.ok and again == corpus)
        checks["TSV round-trip on 500 corpora"] = roundtrip_failures == 0
    assert all(checks.values()), checks


def test_criterion_7_determinism(fixture_path, tmp_path, capsys):
    with criterion(7, "analyze output bytes identical across two runs (fixtures + 20 random corpora)") as checks:
        paths = [fixture_path(n) for n in ("example1.tsv", "example2.tsv", "example3.tsv")]
        for seed in range(20):
            path = tmp_path / f"random{seed}.tsv"
            path.write_bytes(write_corpus(random_corpus(7000 + seed)))
            paths.append(path)
        differing = []
        for path in paths:
            outputs = []
            for _ in range(2):
                code = cli.main(["analyze", str(path)])
                outputs.append((code, capsys.readouterr().out.encode()))
            if outputs[0] != outputs[1] or outputs[0][0] != 0:
                differing.append(path.name)
        checks[f"identical bytes on {len(paths)} inputs"] = not differing
    assert all(checks.values()), checks
