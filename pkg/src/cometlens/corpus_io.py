"""Reading and writing corpora.

Two interchangeable encodings are supported:

* ``TSV``: one unit per row under a fixed header (see :data:`COLUMNS`);
  ``-`` marks an absent optional field.  Optional ``# key=value`` lines
  before the header carry corpus metadata; ``# actors=A,B`` declares a
  roster, in which case every row's actor must belong to it.
* ``DOC``: a JSON document ``{"meta": {...}, "actors": [...], "units": [...]}``
  whose unit objects use the TSV column names, ``null`` for absent fields.

Parsing never raises on bad input; it returns ``(None, report)`` with
line-numbered errors.  For DOC input the "line" is the 1-based position of
the unit in the ``units`` array.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import ModelError, ParseError
from .model import (
    AnnotationUnit,
    Corpus,
    GestureAction,
    GestureAttrs,
    GestureKind,
    Modality,
    Modulation,
    ObjectRef,
    TimeInterval,
    ToolRef,
    VerbalAction,
    format_ms,
    parse_time,
)

COLUMNS = (
    "unit_id",
    "actor",
    "modality",
    "t_start",
    "t_end",
    "modulation",
    "action",
    "object",
    "transcription",
    "obj1",
    "obj2",
    "tool",
    "area",
)
ABSENT = "-"

_GESTURE_ONLY = ("obj1", "obj2", "tool", "area")
_MODALITY_TOKENS = {"V": Modality.VERBAL, "VERBAL": Modality.VERBAL, "G": Modality.GESTURAL, "GESTURAL": Modality.GESTURAL}
_MODULATION_TOKENS = {
    "A": Modulation.ASSERT,
    "ASSERT": Modulation.ASSERT,
    "R": Modulation.REQUEST,
    "REQ": Modulation.REQUEST,
    "REQUEST": Modulation.REQUEST,
}


class Format(str, Enum):
    TSV = "TSV"
    DOC = "DOC"


@dataclass(frozen=True)
class Issue:
    line: int
    code: str
    message: str

    def as_dict(self) -> dict:
        return {"line": self.line, "code": self.code, "message": self.message}


@dataclass
class ParseReport:
    unit_count: int = 0
    warnings: list[Issue] = field(default_factory=list)
    errors: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "unit_count": self.unit_count,
            "errors": [i.as_dict() for i in self.errors],
            "warnings": [i.as_dict() for i in self.warnings],
        }


class _RowError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def guess_format(path: str | Path) -> Format:
    return Format.DOC if str(path).lower().endswith((".json", ".doc")) else Format.TSV


def _absent(value: str | None) -> bool:
    return value is None or value == ABSENT


def _required(fields: dict, name: str) -> str:
    value = fields.get(name)
    if _absent(value) or value == "":
        raise _RowError("E_FIELDGROUP", f"missing required field {name!r}")
    return value


def _coded(value: str, name: str) -> str:
    if value.strip() != value or value == "":
        raise _RowError("E_CODE", f"field {name!r} has empty or padded value {value!r}")
    return value


def _unit_from_fields(fields: dict, roster: frozenset[str] | None, warn) -> AnnotationUnit:
    unit_id = _coded(_required(fields, "unit_id"), "unit_id")
    actor = _coded(_required(fields, "actor"), "actor")
    if roster is not None and actor not in roster:
        raise _RowError("E_ACTOR", f"actor {actor!r} is not in the declared roster")

    modality = _MODALITY_TOKENS.get(_required(fields, "modality").upper())
    if modality is None:
        raise _RowError("E_CODE", f"unknown modality {fields['modality']!r} (expected V or G)")

    try:
        interval = TimeInterval(parse_time(_required(fields, "t_start")), parse_time(_required(fields, "t_end")))
    except (ValueError, ModelError) as exc:
        raise _RowError("E_TIME", str(exc)) from None

    try:
        obj = ObjectRef.parse(_required(fields, "object"))
    except ModelError as exc:
        raise _RowError("E_OBJECT", exc.args[0]) from None

    transcription = fields.get("transcription")
    if transcription == ABSENT:
        transcription = None

    action_text = _required(fields, "action")
    modulation_text = fields.get("modulation")

    if modality is Modality.VERBAL:
        extra = [name for name in _GESTURE_ONLY if not _absent(fields.get(name))]
        if extra:
            raise _RowError("E_FIELDGROUP", f"gestural field(s) {', '.join(extra)} set on a verbal unit")
        if _absent(modulation_text):
            modulation = Modulation.ASSERT
        else:
            modulation = _MODULATION_TOKENS.get(modulation_text.upper())
            if modulation is None:
                raise _RowError("E_CODE", f"unknown modulation {modulation_text!r}")
        try:
            v_action = VerbalAction.parse(action_text)
        except ValueError as exc:
            raise _RowError("E_CODE", str(exc)) from None
        if not transcription:
            warn("W_EMPTY_TRANSCRIPTION", f"verbal unit {unit_id!r} has no transcription")
        return AnnotationUnit(
            unit_id, actor, modality, interval, obj,
            modulation=modulation, v_action=v_action, transcription=transcription,
        )

    if not _absent(modulation_text):
        raise _RowError("E_FIELDGROUP", "modulation is only defined for verbal units")
    if _absent(fields.get("obj1")):
        raise _RowError("E_FIELDGROUP", "gestural unit needs obj1 (the document acted on)")
    try:
        g_action = GestureAction.parse(action_text)
    except (ValueError, ModelError) as exc:
        raise _RowError("E_CODE", str(exc)) from None
    if g_action.kind is GestureKind.EXT:
        warn("W_EXT_GESTURE", f"gesture action {action_text!r} is outside the closed vocabulary; kept as EXT")
    tool = None
    if not _absent(fields.get("tool")):
        tool = ToolRef.parse(_coded(fields["tool"], "tool"))
    attrs = GestureAttrs(
        obj1=_coded(fields["obj1"], "obj1"),
        obj2=None if _absent(fields.get("obj2")) else _coded(fields["obj2"], "obj2"),
        tool=tool,
        area=None if _absent(fields.get("area")) else _coded(fields["area"], "area"),
    )
    return AnnotationUnit(
        unit_id, actor, modality, interval, obj,
        g_action=g_action, attrs=attrs, transcription=transcription,
    )


def _collect(records: Iterable[tuple[int, dict]], roster, meta, report: ParseReport):
    units: list[AnnotationUnit] = []
    seen: dict[str, int] = {}
    for line, fields in records:
        def warn(code, message, _line=line):
            report.warnings.append(Issue(_line, code, message))

        try:
            unit = _unit_from_fields(fields, roster, warn)
        except _RowError as exc:
            report.errors.append(Issue(line, exc.code, exc.args[0]))
            continue
        except ModelError as exc:
            report.errors.append(Issue(line, exc.code, exc.args[0]))
            continue
        if unit.unit_id in seen:
            report.errors.append(
                Issue(line, "E_DUPID", f"unit id {unit.unit_id!r} already used on line {seen[unit.unit_id]}")
            )
            continue
        seen[unit.unit_id] = line
        units.append(unit)
    if report.errors:
        return None
    report.unit_count = len(units)
    return Corpus.build(units, actors=roster, meta=meta)


def _decode(data: bytes | str, report: ParseReport) -> str | None:
    if isinstance(data, str):
        return data
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        report.errors.append(Issue(1 + data[: exc.start].count(b"\n"), "E_ENCODING", f"input is not UTF-8: {exc.reason}"))
        return None
    return text.removeprefix("﻿")


def _parse_tsv(text: str, report: ParseReport) -> Corpus | None:
    lines = text.splitlines(keepends=True)
    meta: dict[str, str] = {}
    roster = None
    idx = 0
    while idx < len(lines) and lines[idx].startswith("#"):
        body = lines[idx][1:].strip()
        key, eq, value = body.partition("=")
        key = key.strip()
        if eq and key == "actors":
            roster = frozenset(a.strip() for a in value.split(",") if a.strip())
        elif eq and key:
            meta[key] = value.strip()
        idx += 1
    if idx >= len(lines):
        report.errors.append(Issue(idx + 1, "E_HEADER", "missing header row"))
        return None
    header = lines[idx].rstrip("\r\n").split("\t")
    if tuple(header) != COLUMNS:
        missing = [c for c in COLUMNS if c not in header]
        detail = f"missing {', '.join(missing)}" if missing else "columns out of order or renamed"
        report.errors.append(Issue(idx + 1, "E_HEADER", f"bad header ({detail}); expected: {' '.join(COLUMNS)}"))
        return None
    header_line = idx + 1

    def records():
        reader = csv.reader(io.StringIO("".join(lines[header_line:]), newline=""), delimiter="\t")
        prev = 0
        for row in reader:
            line = header_line + prev + 1
            prev = reader.line_num
            if not row or row == [""]:
                continue
            if len(row) != len(COLUMNS):
                report.errors.append(
                    Issue(line, "E_ROW", f"expected {len(COLUMNS)} tab-separated fields, found {len(row)}")
                )
                continue
            yield line, dict(zip(COLUMNS, row))

    return _collect(records(), roster, meta, report)


def _parse_doc(text: str, report: ParseReport) -> Corpus | None:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        report.errors.append(Issue(exc.lineno, "E_DOC", f"malformed document: {exc.msg}"))
        return None
    if not isinstance(doc, dict) or not isinstance(doc.get("units"), list):
        report.errors.append(Issue(1, "E_HEADER", "document needs a top-level 'units' list"))
        return None
    unknown_top = sorted(set(doc) - {"meta", "actors", "units"})
    if unknown_top:
        report.errors.append(Issue(1, "E_HEADER", f"unknown top-level keys: {', '.join(unknown_top)}"))
        return None
    meta = doc.get("meta") or {}
    actors = doc.get("actors")
    if not isinstance(meta, dict) or (actors is not None and not isinstance(actors, list)):
        report.errors.append(Issue(1, "E_HEADER", "'meta' must be an object and 'actors' a list"))
        return None
    meta = {str(k): str(v) for k, v in meta.items()}
    roster = frozenset(str(a) for a in actors) if actors is not None else None

    def records():
        for n, raw in enumerate(doc["units"], start=1):
            if not isinstance(raw, dict):
                report.errors.append(Issue(n, "E_ROW", "unit record must be an object"))
                continue
            keys = set(raw)
            if keys != set(COLUMNS):
                missing = sorted(set(COLUMNS) - keys)
                extra = sorted(keys - set(COLUMNS))
                report.errors.append(
                    Issue(n, "E_HEADER", f"unit fields mismatch (missing: {missing}, unknown: {extra})")
                )
                continue
            bad = sorted(
                k for k, v in raw.items()
                if v is not None and (isinstance(v, bool) or not isinstance(v, (str, int, float)))
            )
            if bad:
                report.errors.append(Issue(n, "E_CODE", f"fields must be strings or null: {', '.join(bad)}"))
                continue
            yield n, {k: None if v is None else str(v) for k, v in raw.items()}

    return _collect(records(), roster, meta, report)


def parse_corpus(data: bytes | str, fmt: Format | str = Format.TSV) -> tuple[Corpus | None, ParseReport]:
    """Parse a corpus; the corpus is ``None`` whenever the report has errors."""
    fmt = Format(str(fmt).upper()) if not isinstance(fmt, Format) else fmt
    report = ParseReport()
    text = _decode(data, report)
    if text is None:
        return None, report
    corpus = _parse_tsv(text, report) if fmt is Format.TSV else _parse_doc(text, report)
    if corpus is None and not report.errors:  # defensive; _collect only returns None on error
        report.errors.append(Issue(1, "E_PARSE", "no corpus produced"))
    return corpus, report


def load_corpus(path: str | Path, fmt: Format | str | None = None) -> tuple[Corpus, ParseReport]:
    """Read ``path`` and parse it, raising :class:`ParseError` on any error."""
    fmt = guess_format(path) if fmt is None else fmt
    corpus, report = parse_corpus(Path(path).read_bytes(), fmt)
    if corpus is None:
        raise ParseError(report)
    return corpus, report


def unit_fields(unit: AnnotationUnit) -> dict[str, str | None]:
    """Column-name → text mapping for one unit; ``None`` for absent fields."""
    attrs = unit.attrs
    return {
        "unit_id": unit.unit_id,
        "actor": unit.actor,
        "modality": unit.modality.value,
        "t_start": format_ms(unit.start_ms),
        "t_end": format_ms(unit.end_ms),
        "modulation": unit.modulation.value if unit.modulation is not None else None,
        "action": unit.action_token,
        "object": unit.object.token,
        "transcription": unit.transcription,
        "obj1": attrs.obj1 if attrs else None,
        "obj2": attrs.obj2 if attrs else None,
        "tool": attrs.tool.text if attrs and attrs.tool else None,
        "area": attrs.area if attrs else None,
    }


def _write_tsv(corpus: Corpus) -> str:
    buf = io.StringIO()
    for key, value in corpus.meta.items():
        buf.write(f"# {key}={value}\n")
    unit_actors = {u.actor for u in corpus.units}
    if corpus.actors != unit_actors:
        buf.write(f"# actors={','.join(sorted(corpus.actors))}\n")
    buf.write("\t".join(COLUMNS) + "\n")
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    for unit in corpus.units:
        fields = unit_fields(unit)
        writer.writerow([ABSENT if fields[c] is None else fields[c] for c in COLUMNS])
    return buf.getvalue()


def _write_doc(corpus: Corpus) -> str:
    doc = {
        "meta": dict(corpus.meta),
        "actors": sorted(corpus.actors),
        "units": [unit_fields(u) for u in corpus.units],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_corpus(corpus: Corpus, fmt: Format | str = Format.TSV) -> bytes:
    fmt = Format(str(fmt).upper()) if not isinstance(fmt, Format) else fmt
    text = _write_tsv(corpus) if fmt is Format.TSV else _write_doc(corpus)
    return text.encode("utf-8")
