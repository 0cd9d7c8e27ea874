from __future__ import annotations

import hashlib
import io
import json
import subprocess
import sys

import pytest

from cometlens import cli
from cometlens.corpus_io import COLUMNS

from test_synth import PLANTED


def run(args, capsys, stdin: bytes | None = None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(stdin)))
    code = cli.main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_example1(fixture_path, capsys):
    code, out, _ = run(["validate", fixture_path("example1.tsv"), "--json"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["unit_count"] == 2 and report["ok"] is True


def test_validate_swapped_times(tmp_path, capsys):
    path = tmp_path / "bad.tsv"
    path.write_text("\t".join(COLUMNS) + "\n" + "1\tL\tV\t5\t4\tA\tGEN\tDAT\tx\t-\t-\t-\t-\n")
    code, out, _ = run(["validate", path], capsys)
    assert code == 1 and "E_TIME" in out and "line 2" in out


def test_validate_empty_corpus(tmp_path, capsys):
    path = tmp_path / "empty.tsv"
    path.write_text("\t".join(COLUMNS) + "\n")
    code, out, _ = run(["validate", path, "--json"], capsys)
    report = json.loads(out)
    assert code == 0 and report["unit_count"] == 0
    assert [w["code"] for w in report["warnings"]] == ["W_EMPTY"]


def test_analyze_example3(fixture_path, capsys):
    code, out, _ = run(["analyze", fixture_path("example3.tsv")], capsys)
    assert code == 0 and out.endswith("}\n")
    report = json.loads(out)
    (c,) = report["coalitions"]
    assert c["block"] == ["C", "M"] and c["disalignment"] == "PROBLEM_SHIFT"
    assert [o["actors"] for o in c["opposed"]] == [["L"]]
    assert report["config"]["gap_tolerance"] == 1.0
    assert '"gap_tolerance": 1.000,' in out
    assert len(report["pattern_matches"]) == 1


def test_analyze_space_has_no_coalition(fixture_path, capsys):
    code, out, _ = run(["analyze", fixture_path("example3.tsv"), "--granularity", "SPACE"], capsys)
    assert code == 0 and json.loads(out)["coalitions"] == []


def test_analyze_deterministic(fixture_path, capsys):
    hashes = set()
    for _ in range(2):
        _, out, _ = run(["analyze", fixture_path("example2.tsv")], capsys)
        hashes.add(hashlib.sha256(out.encode()).hexdigest())
    assert len(hashes) == 1


def test_analyze_csv_bundle(fixture_path, tmp_path, capsys):
    code, _, _ = run(["analyze", fixture_path("example3.tsv"), "--csv", "--out", tmp_path], capsys)
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == [
        "coalitions.csv", "cooccurrence.csv", "durations.csv", "episodes.csv",
        "histogram.csv", "pairs.csv", "transitions.csv",
    ]
    assert (tmp_path / "coalitions.csv").read_text().count("\n") == 2


def test_episodes_example2(fixture_path, capsys):
    code, out, _ = run(["episodes", fixture_path("example2.tsv")], capsys)
    eps = json.loads(out)
    ints = [e for e in eps if e["label"] == "INT"]
    assert code == 0 and len(ints) == 1 and ints[0]["blocks"][0]["actors"] == ["C", "L"]


def test_coalitions_command(fixture_path, capsys):
    code, out, _ = run(["coalitions", fixture_path("example3.tsv")], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["summary"]["count"] == 1


def test_stats_totals_match_analyze(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps(PLANTED))
    corpus = tmp_path / "c.tsv"
    assert run(["synth", "--spec", spec, "--seed", 9, "--out", corpus], capsys)[0] == 0
    _, stats_out, _ = run(["stats", corpus], capsys)
    _, analyze_out, _ = run(["analyze", corpus], capsys)
    stats, report = json.loads(stats_out), json.loads(analyze_out)
    assert stats == report["stats"]
    assert stats["cooccurrence"]["total"] == report["summary"]["pairs"]


def test_synth_twice_identical(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps(PLANTED))
    outs = []
    for name in ("a.tsv", "b.tsv"):
        run(["synth", "--spec", spec, "--seed", 7, "--out", tmp_path / name, "--truth", tmp_path / f"{name}.truth.json"], capsys)
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    truth = json.loads((tmp_path / "a.tsv.truth.json").read_text())
    assert truth["coalitions"][0]["start"] == 10.0


def test_stdin_input(fixture_path, capsys, monkeypatch):
    data = fixture_path("example1.tsv").read_bytes()
    code, out, _ = run(["episodes", "-"], capsys, stdin=data, monkeypatch=monkeypatch)
    assert code == 0 and json.loads(out)[0]["label"] == "SOLO"


@pytest.mark.parametrize(
    "extra",
    [["--gap-tol", "-1"], ["--gap-tol", "0.0001"], ["--pattern", "INT ("], ["--min-episode", "abc"]],
)
def test_config_errors_exit_2(fixture_path, capsys, extra):
    code, _, err = run(["analyze", fixture_path("example3.tsv"), *extra], capsys)
    assert code == 2 and err.startswith("error:")


def test_bad_granularity_is_usage_error(fixture_path, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["analyze", str(fixture_path("example3.tsv")), "--granularity", "TOPIC"])
    assert info.value.code == 2


def test_invalid_corpus_exit_1(tmp_path, capsys):
    path = tmp_path / "bad.tsv"
    path.write_text("nope\n")
    code, _, err = run(["analyze", path], capsys)
    assert code == 1 and "E_HEADER" in err


def test_missing_file_exit_2(tmp_path, capsys):
    code, _, _ = run(["analyze", tmp_path / "nope.tsv"], capsys)
    assert code == 2


def test_bad_synth_spec_exit_2(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({**PLANTED, "span": 99}))
    code, _, err = run(["synth", "--spec", spec], capsys)
    assert code == 2 and "E_SPEC" in err


def test_invariant_violation_exit_3(fixture_path, capsys, monkeypatch):
    from cometlens import report
    from cometlens.errors import InvariantError

    def broken(_analysis):
        raise InvariantError("forced")

    monkeypatch.setattr(report, "check_invariants", broken)
    code, _, err = run(["analyze", fixture_path("example1.tsv")], capsys)
    assert code == 3 and "E_INVARIANT" in err


def test_module_entry_point_no_color(fixture_path):
    proc = subprocess.run(
        [sys.executable, "-m", "cometlens", "validate", str(fixture_path("example1.tsv"))],
        capture_output=True, text=True, env={"COMETLENS_NO_COLOR": "1", "PATH": ""},
    )
    assert proc.returncode == 0 and proc.stdout == "OK: 2 units, 0 errors, 0 warnings\n"
