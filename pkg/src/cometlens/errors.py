"""Exception types shared across the analysis stages."""

from __future__ import annotations


class CometError(Exception):
    """Base error carrying a stable machine-readable code (``E_*``)."""

    code = "E_INTERNAL"

    def __init__(self, message: str, code: str | None = None, line: int | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.line = line

    def __str__(self) -> str:
        where = f" (line {self.line})" if self.line is not None else ""
        return f"{self.code}{where}: {self.args[0]}"


class ModelError(CometError, ValueError):
    code = "E_MODEL"


class ParseError(CometError):
    """Raised by :func:`cometlens.corpus_io.load_corpus` when parsing fails.

    The full :class:`~cometlens.corpus_io.ParseReport` is attached as ``report``.
    """

    code = "E_PARSE"

    def __init__(self, report):
        first = report.errors[0]
        super().__init__(first.message, code=first.code, line=first.line)
        self.report = report


class ConfigError(CometError, ValueError):
    code = "E_CONFIG"


class EmptyCorpusError(CometError, ValueError):
    code = "E_EMPTY"


class UnknownUnitError(CometError, KeyError):
    code = "E_UNKNOWN_UNIT"

    def __str__(self) -> str:  # KeyError would repr() the message
        return CometError.__str__(self)


class NotDisalignedError(CometError, ValueError):
    code = "E_NOT_DISALIGNED"


class PatternError(CometError, ValueError):
    code = "E_PATTERN"


class NoVerbalError(CometError, ValueError):
    code = "E_NO_VERBAL"


class SynthSpecError(CometError, ValueError):
    code = "E_SPEC"


class InvariantError(CometError, AssertionError):
    """An internal consistency check failed; indicates a bug, not bad input."""

    code = "E_INVARIANT"
