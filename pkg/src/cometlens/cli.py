"""Command-line interface.

Exit status: 0 success, 1 invalid input corpus, 2 bad flags or
configuration, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from . import stats as st
from .corpus_io import Format, guess_format, parse_corpus, write_corpus
from .errors import (
    CometError,
    ConfigError,
    EmptyCorpusError,
    InvariantError,
    ParseError,
    PatternError,
    SynthSpecError,
)
from .model import AnalysisConfig, Granularity
from .report import (
    analyse,
    build_report,
    coalition_dict,
    coalition_summary_dict,
    coalitions_csv,
    dumps,
    episode_dict,
    episodes_csv,
    stats_dict,
    write_csv_bundle,
)
from .synth import generate, load_spec

EXIT_OK, EXIT_INVALID, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2, 3

log = logging.getLogger("cometlens")


def _styled(text: str, code: str, stream) -> str:
    if os.environ.get("COMETLENS_NO_COLOR") or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\033[{code}m{text}\033[0m"


def _emit(text: str, out: str | None = None) -> None:
    """Write ``text`` (already newline-terminated) to ``out`` or stdout."""
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _read_input(path: str, fmt: str | None):
    if path == "-":
        if fmt and fmt.upper() != "TSV":
            raise ConfigError("standard input accepts TSV only")
        return parse_corpus(sys.stdin.buffer.read(), Format.TSV)
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_corpus(data, Format(fmt.upper()) if fmt else guess_format(path))


def _load(args):
    corpus, report = _read_input(args.path, args.format)
    if corpus is None:
        raise ParseError(report)
    if not corpus.units:
        raise EmptyCorpusError("corpus has no units; nothing to analyse")
    return corpus, report


def _config(args) -> AnalysisConfig:
    return AnalysisConfig.from_seconds(
        granularity=args.granularity,
        gap_tolerance=args.gap_tol,
        min_episode_duration=args.min_episode,
        include_near=args.include_near,
    )


def cmd_validate(args) -> int:
    corpus, report = _read_input(args.path, args.format)
    doc = report.as_dict()
    if corpus is not None and not corpus.units:
        doc["warnings"].append({"line": None, "code": "W_EMPTY", "message": "corpus has no units"})
    if args.json:
        _emit(dumps(doc))
    else:
        lines = []
        for kind, items in (("error", doc["errors"]), ("warning", doc["warnings"])):
            for issue in items:
                where = f"line {issue['line']}: " if issue["line"] is not None else ""
                lines.append(f"{kind}: {where}{issue['code']} {issue['message']}")
        status = _styled("OK", "32", sys.stdout) if report.ok else _styled("INVALID", "31", sys.stdout)
        lines.append(f"{status}: {doc['unit_count']} units, {len(doc['errors'])} errors, {len(doc['warnings'])} warnings")
        _emit("\n".join(lines) + "\n")
    return EXIT_OK if report.ok else EXIT_INVALID


def _run(args):
    corpus, report = _load(args)
    analysis = analyse(corpus, _config(args), args.pattern, args.transition_scope)
    return analysis, report


def cmd_analyze(args) -> int:
    analysis, report = _run(args)
    if args.csv:
        if not args.out:
            raise ConfigError("--csv needs --out DIR")
        write_csv_bundle(analysis, args.out)
        return EXIT_OK
    text = dumps(build_report(analysis, report, args.pattern))
    out = args.out
    if out and Path(out).is_dir():
        out = str(Path(out) / "report.json")
    _emit(text, out)
    return EXIT_OK


def cmd_episodes(args) -> int:
    analysis, _ = _run(args)
    if args.csv:
        _emit(episodes_csv(analysis.episodes), args.out)
    else:
        _emit(dumps([episode_dict(e) for e in analysis.episodes]), args.out)
    return EXIT_OK


def cmd_coalitions(args) -> int:
    analysis, _ = _run(args)
    if args.csv:
        _emit(coalitions_csv(analysis.coalitions), args.out)
    else:
        doc = {
            "coalitions": [coalition_dict(c) for c in analysis.coalitions],
            "summary": coalition_summary_dict(analysis),
        }
        _emit(dumps(doc), args.out)
    return EXIT_OK


def cmd_stats(args) -> int:
    analysis, _ = _run(args)
    if args.csv:
        if not args.out:
            raise ConfigError("--csv needs --out DIR")
        write_csv_bundle(analysis, args.out)
    else:
        _emit(dumps(stats_dict(analysis)), args.out)
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        spec = load_spec(args.spec)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.spec}: {exc.strerror}") from None
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    corpus, truth = generate(spec)
    data = write_corpus(corpus, Format(args.out_format.upper()))
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    if args.truth:
        Path(args.truth).write_text(dumps(truth.as_dict()), encoding="utf-8", newline="")
    return EXIT_OK


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("path", help="corpus file, or '-' for TSV on standard input")
    p.add_argument("--format", choices=["tsv", "doc", "TSV", "DOC"], help="input format (default: by extension)")


def _add_analysis(p: argparse.ArgumentParser) -> None:
    defaults = AnalysisConfig()
    p.add_argument(
        "--granularity",
        type=str.upper,
        choices=[g.value for g in Granularity],
        default=defaults.granularity.value,
    )
    p.add_argument("--gap-tol", default="1.000", help="NEAR gap tolerance in seconds (default 1.000)")
    p.add_argument("--min-episode", default="0.000", help="minimum episode duration in seconds (default 0.000)")
    p.add_argument("--include-near", action="store_true", help="count NEAR pairs in the alignment summary")
    p.add_argument("--pattern", default="composite", help="episode-label pattern or preset name")
    p.add_argument(
        "--transition-scope",
        type=str.upper,
        choices=[s.value for s in st.TransitionScope],
        default=st.TransitionScope.POOLED.value,
    )
    p.add_argument("--out", help="output file (or directory with --csv)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--json", action="store_true", help="JSON output (default)")
    mode.add_argument("--csv", action="store_true", help="CSV output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cometlens", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cometlens {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a corpus file")
    _add_input(p)
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_validate)

    for name, func, text in (
        ("analyze", cmd_analyze, "full analysis report"),
        ("episodes", cmd_episodes, "episode segmentation"),
        ("coalitions", cmd_coalitions, "focus-gap coalitions"),
        ("stats", cmd_stats, "co-occurrence, transitions and durations"),
    ):
        p = sub.add_parser(name, help=text)
        _add_input(p)
        _add_analysis(p)
        p.set_defaults(func=func)

    p = sub.add_parser("synth", help="generate a synthetic corpus from a schedule")
    p.add_argument("--spec", required=True, help="JSON synth specification")
    p.add_argument("--seed", type=int, help="override the seed in the synth document")
    p.add_argument("--out", help="corpus output path (default: standard output)")
    p.add_argument("--out-format", choices=["tsv", "doc"], default="tsv")
    p.add_argument("--truth", help="ground-truth JSON output path")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        for issue in exc.report.errors:
            where = f"line {issue.line}: " if issue.line is not None else ""
            print(f"error: {where}{issue.code} {issue.message}", file=sys.stderr)
        return EXIT_INVALID
    except EmptyCorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, PatternError, SynthSpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except CometError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
